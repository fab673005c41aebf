"""Run reports: deterministic key=value text plus a JSON twin.

Every value except the generation timestamp is a pure function of the
dataset and the reconstruction configuration, so regenerating a report from
the same inputs reproduces it byte-for-byte apart from the single
generated_at line.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .budget import BUDGET_FORMAT_VERSION, AgreementCheck, BudgetResult, check_agreement
from .errors import DatasetFormatError, ValidationError
from .pipeline import ReconstructionSummary
from .reconstruction import MarginalHistogram, RadialWignerProfile
from .simulator import HomodyneDataset

REPORT_VERSION = 1


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclass(frozen=True)
class RunReport:
    """Nested sections of scalars describing one reconstructed run."""

    sections: dict[str, dict[str, object]]

    def to_dict(self) -> dict:
        return {"report_version": REPORT_VERSION, **self.sections}

    def to_text(self) -> str:
        lines = [f"report_version={REPORT_VERSION}"]
        for name, body in self.sections.items():
            lines.append("")
            lines.append(f"[{name}]")
            for key, value in body.items():
                lines.append(f"{key}={_fmt(value)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _config_hash(config) -> str:
    payload = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def build_report(summary: ReconstructionSummary, dataset: HomodyneDataset,
                 dataset_path: str | None = None,
                 timestamp: str | None = None) -> RunReport:
    """Assemble the report sections for one reconstructed run."""
    spec = dataset.spec
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")

    diagonals: dict[str, object] = {}
    for d in summary.diagonals:
        diagonals[f"rho_{d.n}{d.n}"] = d.rho_nn
        diagonals[f"sigma_{d.n}{d.n}"] = d.sigma_nn
        diagonals[f"sigma_{d.n}{d.n}_uncentered"] = d.sigma_nn_uncentered

    sections = {
        "dataset": {
            "path": dataset_path or "",
            "rng": dataset.rng_name,
            "seed": spec.seed,
            "eta_true": spec.eta_true,
            "n_vacuum": spec.n_vacuum,
            "n_fock": spec.n_fock,
            "scale": spec.detector.scale,
            "offset": spec.detector.offset,
            "dark_fraction": spec.detector.dark_fraction,
        },
        "calibration": {
            "method": summary.calibration.method,
            "scale_hat": summary.calibration.scale_hat,
            "offset_hat": summary.calibration.offset_hat,
            "fit_residual": summary.calibration.fit_residual,
            "n_used": summary.calibration.n_used,
        },
        "efficiency": {
            "method": summary.efficiency.method,
            "eta_hat": summary.efficiency.eta_hat,
            "eta_stderr": summary.efficiency.eta_stderr,
            "objective": summary.efficiency.objective,
            "at_boundary": summary.efficiency.at_boundary,
            "n_used": summary.efficiency.n_used,
        },
        "diagonals": diagonals,
        "wigner": {
            "origin_from_rho11": summary.wigner_origin_from_rho,
            "origin_sigma": summary.wigner_origin_sigma,
            "origin_reconstructed": summary.wigner_origin_reconstructed,
            "profile_normalization": summary.profile.normalization(),
            "origin_consistent_with_fit": summary.origin_consistent_with_fit(),
        },
        "analysis": {
            "source": summary.analysis_source,
            "n_signal": summary.n_signal,
        },
        "config": {
            "fit_method": summary.config.fit_method,
            "bandwidth": summary.density.bandwidth,
            "bandwidth_scale": summary.config.bandwidth_scale,
            "grid_max": summary.config.grid_max,
            "grid_points": summary.config.grid_points,
            "n_bins": summary.config.n_bins,
            "r_max": summary.config.r_max,
            "n_radii": summary.config.n_radii,
            "calibration_method": summary.config.calibration_method,
            "config_hash": _config_hash(summary.config),
        },
        "provenance": {
            "package_version": __version__,
            "generated_at": timestamp,
        },
    }
    return RunReport(sections=sections)


def write_profile_table(profile: RadialWignerProfile, path, header: dict | None = None) -> None:
    """Two- or three-column text table of the radial Wigner profile."""
    lines = []
    for key, value in (header or {}).items():
        lines.append(f"# {key}={_fmt(value)}")
    if profile.stderr is None:
        lines.append("# columns=radius wigner")
        for r, wv in zip(profile.radii, profile.values):
            lines.append(f"{float(r)!r} {float(wv)!r}")
    else:
        lines.append("# columns=radius wigner stderr")
        for r, wv, s in zip(profile.radii, profile.values, profile.stderr):
            lines.append(f"{float(r)!r} {float(wv)!r} {float(s)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_histogram_table(hist: MarginalHistogram, path, header: dict | None = None) -> None:
    """Three-column text table: bin_left bin_right count."""
    lines = []
    for key, value in (header or {}).items():
        lines.append(f"# {key}={_fmt(value)}")
    lines.append(f"# n_total={hist.n_total}")
    lines.append(f"# underflow={hist.underflow}")
    lines.append(f"# overflow={hist.overflow}")
    lines.append("# columns=bin_left bin_right count")
    for left, right, c in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
        lines.append(f"{float(left)!r} {float(right)!r} {int(c)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Budget output and merged reports


def budget_to_kv(result: BudgetResult, factors) -> str:
    """Budget result as parseable key=value text."""
    lines = [
        f"budget_format_version={BUDGET_FORMAT_VERSION}",
        f"eta_predicted={float(result.eta_predicted)!r}",
        f"eta_uncertainty={float(result.eta_uncertainty)!r}",
        f"n_factors={result.n_factors}",
    ]
    for i, f in enumerate(factors):
        lines.append(f"factor_{i}={f.name} {float(f.value)!r} {float(f.uncertainty)!r} {f.kind}")
    return "\n".join(lines) + "\n"


def parse_budget_kv(text: str) -> dict:
    """Parse budget key=value text back into a dict, checking the version."""
    data: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DatasetFormatError(f"malformed budget line {raw!r}")
        key, _, value = line.partition("=")
        data[key.strip()] = value.strip()
    if "budget_format_version" not in data:
        raise DatasetFormatError("budget file missing budget_format_version")
    version = int(data["budget_format_version"])
    if version != BUDGET_FORMAT_VERSION:
        raise DatasetFormatError(
            f"unsupported budget_format_version {version}, expected {BUDGET_FORMAT_VERSION}"
        )
    try:
        return {
            "budget_format_version": version,
            "eta_predicted": float(data["eta_predicted"]),
            "eta_uncertainty": float(data["eta_uncertainty"]),
            "n_factors": int(data.get("n_factors", 0)),
        }
    except (KeyError, ValueError) as exc:
        raise DatasetFormatError(f"incomplete budget file: {exc}") from exc


def merge_reports(recon: dict, budget: dict | None,
                  timestamp: str | None = None) -> RunReport:
    """Consolidate a reconstruction report and an optional budget result.

    When both are present the budget prediction is compared with the fitted
    efficiency at two combined standard deviations.
    """
    version = recon.get("report_version")
    if version != REPORT_VERSION:
        raise DatasetFormatError(
            f"unsupported report_version {version!r}, expected {REPORT_VERSION}"
        )
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")

    sections: dict[str, dict[str, object]] = {}
    for name, body in recon.items():
        if name == "report_version":
            continue
        if name == "provenance":
            continue
        sections[name] = dict(body)

    if budget is not None:
        result = BudgetResult(
            eta_predicted=budget["eta_predicted"],
            eta_uncertainty=budget["eta_uncertainty"],
            n_factors=budget.get("n_factors", 0),
        )
        eff = recon.get("efficiency", {})
        try:
            eta_hat = float(eff["eta_hat"])
            eta_stderr = float(eff["eta_stderr"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"reconstruction report lacks an efficiency fit: {exc}") from exc
        agreement: AgreementCheck = check_agreement(result, eta_hat, eta_stderr)
        sections["budget"] = {
            "eta_predicted": result.eta_predicted,
            "eta_uncertainty": result.eta_uncertainty,
            "n_factors": result.n_factors,
        }
        sections["agreement"] = {
            "difference": agreement.difference,
            "tolerance": agreement.tolerance,
            "passed": agreement.passed,
        }
    sections["provenance"] = {
        "package_version": __version__,
        "generated_at": timestamp,
    }
    return RunReport(sections=sections)
