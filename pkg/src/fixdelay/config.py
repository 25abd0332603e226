"""Experiment configuration: YAML parsing with strict validation.

One file describes one experiment; subcommands state which sections they
need.  Unknown keys anywhere are rejected so typos fail loudly, and YAML
syntax errors surface with the line number from the parser mark.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

from .delays import DelaySpec
from .errors import ConfigError
from .seeds import SeedConstraints, SeedParameter, SeedFunction, apply_T, identity_seed
from .simulate import HistoryFunction, LinearDDE
from .transform import NewtonSettings

_TOP_KEYS = {"delay", "constraints", "newton", "horizon", "grid_n",
             "seed", "seeds", "simulation", "search", "output"}
_CONSTRAINT_KEYS = {"tau0", "tau0p", "tau_star"}
_NEWTON_KEYS = {"tol", "max_iter"}
_SIM_KEYS = {"a0", "a1", "history", "dt", "lambda_end", "tolerance"}
_SEARCH_KEYS = {"basis_dim", "budget", "seed_rng", "penalty_weight",
                "coarse_factor", "grid_n"}
_OUTPUT_KEYS = {"dir"}
_SEED_KEYS = {"kind", "name", "coeffs", "c", "a", "omega", "phase"}


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _check_keys(section: dict, allowed: set, where: str):
    _require(isinstance(section, dict), f"section '{where}' must be a mapping")
    unknown = set(section) - allowed
    _require(not unknown, f"unknown key(s) {sorted(unknown)} in section '{where}'")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; sections may be None when absent."""

    delay: DelaySpec | None
    tau_star: float | None
    constraints: SeedConstraints | None
    newton: NewtonSettings
    horizon: float
    grid_n: int
    seed_entry: dict | None
    seed_entries: tuple | None
    simulation: dict | None
    search: dict | None
    output_dir: str

    # -- section requirements per subcommand ----------------------------
    def require_delay(self) -> DelaySpec:
        _require(self.delay is not None, "missing required section 'delay'")
        return self.delay

    def require_constraints(self) -> SeedConstraints:
        _require(self.constraints is not None,
                 "missing 'constraints' (at least constraints.tau_star)")
        return self.constraints

    def require_seed(self) -> SeedFunction:
        _require(self.seed_entry is not None, "missing required section 'seed'")
        return build_seed(self.seed_entry, self.require_constraints())

    def require_seed_list(self) -> list:
        _require(self.seed_entries is not None and len(self.seed_entries) > 0,
                 "missing required section 'seeds' (a non-empty list)")
        c = self.require_constraints()
        out = []
        for i, entry in enumerate(self.seed_entries):
            name = entry.get("name", f"seed_{i}")
            out.append((name, build_seed(entry, c)))
        return out

    def require_simulation(self) -> tuple:
        _require(self.simulation is not None, "missing required section 'simulation'")
        s = self.simulation
        dde = LinearDDE(np.asarray(s["a0"], dtype=float),
                        np.asarray(s["a1"], dtype=float),
                        HistoryFunction.from_dict(s["history"]))
        return dde, float(s["dt"]), float(s["lambda_end"]), float(s.get("tolerance", 1e-4))

    def require_search(self) -> dict:
        _require(self.search is not None, "missing required section 'search'")
        return dict(self.search)


def build_seed(entry: dict, constraints: SeedConstraints) -> SeedFunction:
    """A seed from a config entry: a parameter image or a closed-form selector."""
    _check_keys(entry, _SEED_KEYS, "seed")
    kind = entry.get("kind")
    _require(kind is not None, "seed entry needs a 'kind'")
    if kind == "identity":
        extra = set(entry) - {"kind", "name"}
        _require(not extra, f"seed kind 'identity' takes no extra keys, got {sorted(extra)}")
        return identity_seed(constraints.tau_star, constraints)
    nu = SeedParameter.from_dict({k: v for k, v in entry.items() if k != "name"},
                                 constraints.tau_star)
    return apply_T(nu, constraints)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a YAML experiment file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"YAML parse error: {getattr(exc, 'problem', exc)}", line=line)
    except OSError as exc:
        raise ConfigError(str(exc))
    if raw is None:
        raise ConfigError("empty configuration file")
    _check_keys(raw, _TOP_KEYS, "top level")

    delay = DelaySpec.from_dict(raw["delay"]) if "delay" in raw else None

    tau_star = None
    constraints = None
    if "constraints" in raw:
        section = raw["constraints"]
        _check_keys(section, _CONSTRAINT_KEYS, "constraints")
        _require("tau_star" in section, "constraints.tau_star is required")
        tau_star = float(section["tau_star"])
        tau0 = section.get("tau0")
        tau0p = section.get("tau0p")
        if tau0 is None or tau0p is None:
            _require(delay is not None,
                     "constraints.tau0/tau0p omitted but no 'delay' section to derive them")
            tau0 = float(delay.tau(0.0)) if tau0 is None else float(tau0)
            tau0p = float(delay.tau_dot(0.0)) if tau0p is None else float(tau0p)
        try:
            constraints = SeedConstraints(float(tau0), float(tau0p), tau_star)
        except ValueError as exc:
            raise ConfigError(f"invalid constraints: {exc}")

    newton = NewtonSettings()
    if "newton" in raw:
        _check_keys(raw["newton"], _NEWTON_KEYS, "newton")
        newton = NewtonSettings(float(raw["newton"].get("tol", 1e-12)),
                                int(raw["newton"].get("max_iter", 50)))

    seed_entry = raw.get("seed")
    if seed_entry is not None:
        _check_keys(seed_entry, _SEED_KEYS, "seed")
    seed_entries = raw.get("seeds")
    if seed_entries is not None:
        _require(isinstance(seed_entries, list), "'seeds' must be a list")
        for e in seed_entries:
            _check_keys(e, _SEED_KEYS, "seeds[]")
        seed_entries = tuple(seed_entries)

    simulation = raw.get("simulation")
    if simulation is not None:
        _check_keys(simulation, _SIM_KEYS, "simulation")
        for key in ("a0", "a1", "history", "dt", "lambda_end"):
            _require(key in simulation, f"simulation.{key} is required")

    search = raw.get("search")
    if search is not None:
        _check_keys(search, _SEARCH_KEYS, "search")
        _require("basis_dim" in search, "search.basis_dim is required")

    output = raw.get("output", {})
    _check_keys(output, _OUTPUT_KEYS, "output")

    return ExperimentConfig(
        delay=delay,
        tau_star=tau_star,
        constraints=constraints,
        newton=newton,
        horizon=float(raw.get("horizon", 100.0)),
        grid_n=int(raw.get("grid_n", 10_000)),
        seed_entry=seed_entry,
        seed_entries=seed_entries,
        simulation=simulation,
        search=search,
        output_dir=str(output.get("dir", ".")),
    )
