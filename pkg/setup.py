"""
Package resonance_lab.

Usage:
    pip install .

Installs the `resonance_lab` package and the `resonance-lab` command,
the same entry point as `python3 -m resonance_lab.main`.
"""

from setuptools import setup, find_packages

setup(
    name="resonance_lab",
    version="0.1.0",
    packages=find_packages(include=["resonance_lab", "resonance_lab.*"]),
    python_requires=">=3.12",
    install_requires=[
        "numpy",
        "scipy",
        "pyparsing",
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
    },
    entry_points={
        "console_scripts": [
            "resonance-lab=resonance_lab.main:main",
        ],
    },
)
