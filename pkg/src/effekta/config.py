"""Run configuration: which monad, which operations, which interpretation.

A configuration file is JSON of the shape::

    {"monad": "output",
     "params": {"locations": ["l", "l2"]},
     "operations": [{"name": "write_l", "kind": "write", "param": "l"}, ...],
     "interpretation": "OutputExact",
     "budgets": {"steps": 64, "approx": 30, "inclusion": {"max_len": 8}}}

``param`` and ``signature`` may be omitted; they default from the
operation kind and the ``raise_X`` / ``write_X`` naming convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from .effects import Bounds
from .interpretations import COMPATIBLE, InterpKind
from .monads import (
    DistributionMonad, ExceptionMonad, ListMonad, Monad, OperationImpl, PointedOutputMonad,
)
from .syntax import Signature
from .types import BOOL, BOT, NAT, UNIT, Type

MONADS = {
    "exception": ExceptionMonad,
    "list": ListMonad,
    "distribution": DistributionMonad,
    "output": PointedOutputMonad,
}

# the only signature each operation kind can have
KIND_SIGNATURES = {
    "raise": Signature((), BOT),
    "choose": Signature((), BOOL),
    "write": Signature((NAT,), UNIT),
}

DEFAULT_INTERPRETATION = {
    "exception": InterpKind.EXC_SETS,
    "list": InterpKind.NONDET_ALL01,
    "distribution": InterpKind.DIST_SUPPORT,
    "output": InterpKind.OUTPUT_EXACT,
}

_TYPE_NAMES: dict[str, Type] = {"Nat": NAT, "Bool": BOOL, "Unit": UNIT, "Bot": BOT}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Budgets:
    steps: int = 64
    approx: int = 30
    inclusion: Bounds = field(default_factory=Bounds)


@dataclass(frozen=True)
class RunConfig:
    monad: str
    tag: Monad
    impls: Mapping[str, OperationImpl]
    interpretation: InterpKind
    budgets: Budgets = field(default_factory=Budgets)

    @property
    def signatures(self) -> dict[str, Signature]:
        return {name: i.signature for name, i in self.impls.items()}


def _signature(raw: Any, where: str) -> Signature:
    if not isinstance(raw, dict) or "result" not in raw:
        raise ConfigError(f"{where}: signature must be an object with 'args' and 'result'")
    try:
        args = tuple(_TYPE_NAMES[t] for t in raw.get("args", []))
        return Signature(args, _TYPE_NAMES[raw["result"]])
    except KeyError as err:
        raise ConfigError(f"{where}: unknown type {err.args[0]!r}") from None


def _operation(raw: Any, monad: str) -> OperationImpl:
    if not isinstance(raw, dict) or "name" not in raw:
        raise ConfigError("each operation needs a 'name'")
    name = raw["name"]
    kind = raw.get("kind")
    if kind is None:
        kind = "raise" if name.startswith("raise_") else "write" if name.startswith("write_") else name
    if kind not in KIND_SIGNATURES:
        raise ConfigError(f"operation {name}: unknown kind {kind!r}")
    if not MONADS[monad]().supports(kind):
        raise ConfigError(f"operation {name}: kind {kind} is not available in the {monad} monad")
    param = raw.get("param")
    if param is None and kind in ("raise", "write"):
        prefix = kind + "_"
        if not name.startswith(prefix):
            raise ConfigError(f"operation {name}: missing 'param'")
        param = name[len(prefix):]
    expected = KIND_SIGNATURES[kind]
    sig = _signature(raw["signature"], f"operation {name}") if "signature" in raw else expected
    if sig != expected:
        raise ConfigError(f"operation {name}: a {kind} operation must have signature {_show_sig(expected)}")
    return OperationImpl(name, kind, param, sig)


def _show_sig(s: Signature) -> str:
    return "(" + ", ".join(t.name for t in s.args) + ") -> " + s.result.name


def config_from_dict(raw: Mapping[str, Any]) -> RunConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError("configuration must be a JSON object")
    monad = raw.get("monad")
    if monad not in MONADS:
        raise ConfigError(f"unknown monad {monad!r}; expected one of {', '.join(MONADS)}")
    ops = [_operation(o, monad) for o in raw.get("operations", [])]
    impls = {o.name: o for o in ops}
    if len(impls) != len(ops):
        raise ConfigError("duplicate operation name")
    params = raw.get("params", {})
    if monad == "exception":
        names = set(params.get("exceptions", [])) | {o.param for o in ops}
        tag: Monad = ExceptionMonad(names)
    elif monad == "output":
        locs = set(params.get("locations", [])) | {o.param for o in ops}
        tag = PointedOutputMonad(locs)
    else:
        tag = MONADS[monad]()
    try:
        kind = InterpKind(raw.get("interpretation", DEFAULT_INTERPRETATION[monad]))
    except ValueError:
        raise ConfigError(f"unknown interpretation {raw.get('interpretation')!r}") from None
    if not isinstance(tag, COMPATIBLE[kind]):
        raise ConfigError(f"interpretation {kind.value} does not fit the {monad} monad")
    b = raw.get("budgets", {})
    try:
        inclusion = Bounds(**b.get("inclusion", {}))
        budgets = Budgets(int(b.get("steps", 64)), int(b.get("approx", 30)), inclusion)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad budgets: {err}") from None
    for f in fields(inclusion):
        v = getattr(inclusion, f.name)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ConfigError(f"bad budgets: inclusion bound {f.name} must be a non-negative integer")
    return RunConfig(monad, tag, impls, kind, budgets)


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON at line {err.lineno}: {err.msg}") from None
    return config_from_dict(raw)


def preset(monad: str) -> RunConfig:
    """The configuration the example programs are written against."""
    ops = {
        "exception": [{"name": "raise_PredZero"}, {"name": "raise_e"}],
        "list": [{"name": "choose"}],
        "distribution": [{"name": "choose"}],
        "output": [{"name": "write_l"}, {"name": "write_l2"}],
    }[monad]
    return config_from_dict({"monad": monad, "operations": ops})
