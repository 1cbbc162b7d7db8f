"""
Scenario and manifest files (TOML)
"""
import copy
import math
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Tuple, Type, TypeVar

from pydantic import BaseModel, ValidationError

from botlc.exceptions import ScenarioError
from botlc.models.schemas import CompareManifest, Scenario, SweepManifest

M = TypeVar("M", bound=BaseModel)


def load_toml(path: Path) -> Dict[str, Any]:
    path = Path(path)
    try:
        with path.open("rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise ScenarioError(f"{path}: file not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: invalid TOML: {exc}") from exc


def deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; tables merge, everything else is replaced"""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _validate(model: Type[M], data: Dict[str, Any], source: str) -> M:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(f"{source}: {exc}") from exc


def scenario_from_dict(data: Dict[str, Any], source: str = "scenario") -> Scenario:
    return _validate(Scenario, data, source)


def load_scenario_data(path: Path) -> Dict[str, Any]:
    """Raw scenario table; the name defaults to the file stem"""
    data = load_toml(path)
    data.setdefault("name", Path(path).stem)
    return data


def load_scenario(path: Path) -> Scenario:
    return scenario_from_dict(load_scenario_data(path), str(path))


def _load_manifest(path: Path, model: Type[M]) -> Tuple[M, Dict[str, Any]]:
    path = Path(path)
    data = load_toml(path)
    data.setdefault("name", path.stem)
    if "base" in data:
        # Base scenario paths are relative to the manifest
        data["base"] = str((path.parent / data["base"]).resolve())
    manifest = _validate(model, data, str(path))
    return manifest, load_scenario_data(manifest.base)


def load_compare_manifest(path: Path) -> Tuple[CompareManifest, List[Scenario]]:
    """Manifest plus one scenario per listed method, on shared initial conditions"""
    manifest, base = _load_manifest(path, CompareManifest)
    base = deep_merge(base, manifest.overrides)
    scenarios = []
    for label, method in variant_labels(manifest.methods):
        data = deep_merge(base, {"method": method, "name": f"{base['name']}_{label}"})
        scenarios.append(scenario_from_dict(data, f"{path} [{label}]"))
    return manifest, scenarios


def variant_labels(methods: List[str]) -> List[Tuple[str, str]]:
    """(label, method) pairs; repeated methods get a numeric suffix"""
    seen: Dict[str, int] = {}
    labels = []
    for method in methods:
        seen[method] = seen.get(method, 0) + 1
        labels.append((method if seen[method] == 1 else f"{method}_{seen[method]}", method))
    return labels


def load_sweep_manifest(path: Path) -> Tuple[SweepManifest, List[Scenario]]:
    """Manifest plus one scenario per initial estimate offset"""
    manifest, base = _load_manifest(path, SweepManifest)
    base = deep_merge(base, manifest.overrides)
    reference = scenario_from_dict(base, str(manifest.base))

    target = reference.initial.target
    if manifest.direction is not None:
        dx, dy = manifest.direction
    else:
        dx = reference.initial.x_hat[0] - target[0]
        dy = reference.initial.x_hat[1] - target[1]
    length = math.hypot(dx, dy)
    if length == 0.0:
        raise ScenarioError(
            f"{path}: offset direction is undefined; give `direction` or a base "
            "scenario whose initial estimate differs from the target"
        )
    ux, uy = dx / length, dy / length

    scenarios = []
    for offset in manifest.offsets_m:
        x_hat = [target[0] + offset * ux, target[1] + offset * uy]
        data = deep_merge(base, {"name": f"{base['name']}_offset_{offset:g}", "initial": {"x_hat_m": x_hat}})
        scenarios.append(scenario_from_dict(data, f"{path} [offset {offset:g}]"))
    return manifest, scenarios
