import csv
import json
import math
import sys
from collections.abc import Iterable, Mapping
from dataclasses import fields, is_dataclass

import numpy as np

from resonance_lab.eigenpath import Eigenpath
from resonance_lab.laurent import LaurentSeries
from resonance_lab.projection_decomposition import HankelPair
from resonance_lab.resonance_structure import JordanData, UpsilonFiltration
from resonance_lab.spectral_flow import FlowReport
from resonance_lab.tangency import ResonantCurve


REPORT_VERSION = 1


def to_json(value):
    """Plain JSON data for reports: complex numbers as [re, im], arrays as nested lists."""
    match value:
        case None | bool() | str():
            return value
        case np.bool_():
            return bool(value)
        case int() | np.integer():
            return int(value)
        case float() | np.floating():
            value = float(value)
            if math.isnan(value):
                return 'nan'
            if math.isinf(value):
                return 'inf' if value > 0 else '-inf'
            return value
        case complex() | np.complexfloating():
            return [to_json(value.real), to_json(value.imag)]
        case np.ndarray():
            return [to_json(x) for x in value]
        case Mapping():
            return {str(k): to_json(v) for k, v in value.items()}
        case list() | tuple():
            return [to_json(x) for x in value]
    if is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_json(getattr(value, f.name)) for f in fields(value)}
    raise ValueError(f'Unknown report value type: {type(value).__name__!r}')


def series_to_dict(series: LaurentSeries) -> dict:
    return {
        'z0': to_json(series.z0),
        'pole_order': series.pole_order,
        'K': {str(j): to_json(k) for j, k in sorted(series.coefficients.items())},
        'radius': series.contour_radius,
        'nodes': series.node_count,
        'truncation_residual': series.truncation_residual,
    }


def filtration_to_dict(filtration: UpsilonFiltration, jordan: JordanData | None = None) -> dict:
    doc = {
        'dims': list(filtration.dims),
        'order': filtration.order_d,
        'probe': to_json(filtration.probe),
        'probe_angle': filtration.probe_angle,
    }
    if jordan is not None:
        doc['block_sizes'] = list(jordan.block_sizes)
        doc['ranks'] = list(jordan.ranks)
    return doc


def hankel_to_dict(pair: HankelPair) -> dict:
    return {
        'orders': list(pair.orders),
        'branch_ids': list(pair.branch_ids),
        'beta': to_json(pair.beta),
        'alpha': to_json(pair.alpha),
        'hankel_residual': pair.hankel_residual,
        'cross_residual': pair.cross_residual,
        'inverse_residual': pair.inverse_residual,
    }


def write_report(report: Mapping, path: str | None) -> None:
    """Versioned JSON with sorted keys; `path` None writes to stdout."""
    doc = {'version': REPORT_VERSION, **to_json(report)}
    if path is None:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write('\n')
        return

    with open(path, 'w', encoding='utf-8') as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write('\n')


def _write_csv(path: str, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def write_trajectory_csv(paths: list[Eigenpath], path: str) -> None:
    """One row per sampled (v, z(v)) of every eigenpath."""
    _write_csv(
        path,
        ['step', 'v_re', 'v_im', 'z_re', 'z_im', 'branch_id'],
        (
            [step, v.real, v.imag, z.real, z.imag, p.branch_id]
            for p in paths
            for step, (v, z, _phi) in enumerate(p.samples)
        ),
    )


def write_flow_csv(reports: list[FlowReport], path: str) -> None:
    _write_csv(
        path,
        ['lambda', 'total_index', 'ssf_value', 'oracle_value'],
        ([r.lam, r.total_index, r.ssf_value, r.oracle_value] for r in reports),
    )


def write_curve_csv(curve: ResonantCurve, path: str) -> None:
    rows = []
    for v, s in curve.samples:
        realized = curve.realize(v, s)
        smallest = float(np.min(np.abs(np.linalg.eigvals(realized) - curve.z0)))
        rows.append([v.real, v.imag, s.real, s.imag, smallest])
    _write_csv(path, ['v_re', 'v_im', 's_re', 's_im', 'residual'], rows)
