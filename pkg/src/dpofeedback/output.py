"""Deterministic CSV emission.

Every file starts with comment lines embedding the schema version and
the full run manifest, so any figure can be regenerated from its own
output.  Formatting is locale-independent with 12 significant digits;
no timestamps or other run-varying content is written.
"""
from __future__ import annotations

from pathlib import Path

from .scenario import SCHEMA_VERSION, RunManifest
from .spectrum import SpectrumTable
from .stability import StabilityMap

SPECTRUM_COLUMNS = ("omega", "P1", "P2", "N1", "N2",
                    "ReM1", "ImM1", "ReM2", "ImM2", "status")


def _num(x) -> str:
    return "" if x is None else f"{x:.12g}"


def _header(manifest: RunManifest) -> list[str]:
    return [f"# schema_version: {SCHEMA_VERSION}",
            f"# manifest: {manifest.to_json()}"]


def write_spectrum_csv(table: SpectrumTable, manifest: RunManifest, path) -> None:
    lines = _header(manifest)
    lines.append(f"# fingerprint: {table.fingerprint}")
    lines.append(f"# theta_mode: {table.theta_mode}")
    lines.append(",".join(SPECTRUM_COLUMNS))
    for r in table.rows:
        m1 = (r.m1.real, r.m1.imag) if r.m1 is not None else (None, None)
        m2 = (r.m2.real, r.m2.imag) if r.m2 is not None else (None, None)
        cells = [_num(r.omega), _num(r.p1), _num(r.p2), _num(r.n1),
                 _num(r.n2), _num(m1[0]), _num(m1[1]), _num(m2[0]),
                 _num(m2[1]), r.status]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_map_csv(smap: StabilityMap, manifest: RunManifest, path) -> None:
    lines = _header(manifest)
    lines.append(f"# interference: {smap.interference}")
    lines.append("gamma1_tau,alpha_tilde,S1W,stable")
    for x, col in zip(smap.gamma1_tau, smap.s1w):
        for a, v in zip(smap.alpha_tilde, col):
            lines.append(f"{_num(x)},{_num(a)},{_num(v)},{1 if v < 0 else 0}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_boundary_csv(smap: StabilityMap, manifest: RunManifest, path) -> None:
    lines = _header(manifest)
    lines.append("gamma1_tau,alpha_tilde_boundary")
    for x, a in smap.boundary:
        lines.append(f"{_num(x)},{_num(a)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_trace_csv(trace, manifest: RunManifest, path) -> None:
    lines = _header(manifest)
    lines.append("t,Rev1,Imv1,norm")
    for t, v, n in zip(trace.t, trace.v, trace.norm):
        lines.append(f"{_num(t)},{_num(v[0].real)},{_num(v[0].imag)},{_num(n)}")
    Path(path).write_text("\n".join(lines) + "\n")
