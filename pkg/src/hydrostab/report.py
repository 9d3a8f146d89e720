"""Combined stability report and deterministic JSON output."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .causality import CausalityReport, check_causality, check_symmetry_condition
from .dissipativity import DissipativityReport, Theorem1Verdict, certify_theorem1
from .hyperbolicity import DEFAULT_TOL, HyperbolicityReport, classify_hyperbolicity
from .model import ModelParameters, rescale_to_unit_cs


@dataclass
class StabilityReport:
    params: ModelParameters
    hyperbolicity: HyperbolicityReport
    dissipativity: DissipativityReport
    causality: CausalityReport
    symmetry_condition: bool

    @property
    def verdict(self) -> Theorem1Verdict:
        return self.dissipativity.theorem1_verdict

    @property
    def certified(self) -> bool:
        return self.verdict is not Theorem1Verdict.NOT_CERTIFIED

    def to_dict(self) -> dict:
        caus = self.causality.to_dict()
        sub = caus.pop("subcharacteristic")
        return {
            "verdict": self.verdict.value,
            "certified": self.certified,
            "params": self.params.to_dict(),
            "rescaled_params": rescale_to_unit_cs(self.params).to_dict(),
            "sigma": self.params.sigma,
            "hyperbolicity": self.hyperbolicity.to_dict(),
            "dissipativity": self.dissipativity.to_dict(),
            "causality": caus,
            "subcharacteristic": sub,
            "symmetry_condition": self.symmetry_condition,
        }


def stability_report(params: ModelParameters, tol: float = DEFAULT_TOL) -> StabilityReport:
    """Every check on one parameter set, with numeric confirmation of the class."""
    hyp = classify_hyperbolicity(params, tol=tol, numeric=True)
    diss = certify_theorem1(params, tol=tol)
    return StabilityReport(params, hyp, diss, check_causality(params), check_symmetry_condition(params))


def to_plain(obj):
    """Numpy scalars, arrays, enums and complex numbers as plain JSON-able values."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [to_plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k.value if isinstance(k, Enum) else k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(x) for x in obj]
    return obj


def _emit(obj, indent: int, level: int, out: list):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True or obj is False:
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        # non-finite values have no JSON literal
        if not math.isfinite(obj):
            out.append("null")
        else:
            text = f"{obj:.17g}"
            out.append(text if any(c in text for c in ".e") else text + ".0")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    """JSON with floats at 17 significant digits and NaN/inf written as null."""
    out: list[str] = []
    _emit(to_plain(obj), indent, 0, out)
    return "".join(out) + "\n"
