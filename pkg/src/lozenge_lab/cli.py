"""Scenario configs, presets and the build -> blow up -> orbit space -> verify -> render pipeline."""
from dataclasses import dataclass, field
import json
import sys
import time

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:          # Python < 3.11
    import tomli as tomllib

from .presentation import OrbifoldSignature, SignatureError
from .fuchsian import ConstructionRejected, GeometryParams, build_fuchsian
from .limitset import check_dichotomy, compute_minimal_set
from .blowup import ProfileError, attach_gaps, hyperbolic_blow_up
from .orbitspace import build_orbit_space
from . import verify
from .render import render_omega

SCHEMA_VERSION = "1.0"

EXIT_OK, EXIT_CHECK, EXIT_REJECTED = 0, 2, 3

DA_SPEC = [[0.3, 0.5], [0.7, 2.0]]

PRESETS = {
    "geodesic": {
        "description": "pair of pants, k = 1, no blow-ups",
        "signature": {"genus": 0, "orientable": True, "cone_orders": [], "boundary_count": 3, "k": 1},
        "blow": {"s": [], "u": []},
    },
    "da-split": {
        "description": "rho_1 blown up with two interior fixed points on one exit gap",
        "signature": {"genus": 0, "orientable": True, "cone_orders": [], "boundary_count": 3, "k": 1},
        "blow": {"s": [{"gap": [1, 0], "fixed_points": DA_SPEC}], "u": []},
    },
    "double-blow": {
        "description": "independent blow-ups of rho_1 and rho_2 on different gap orbits",
        "signature": {"genus": 0, "orientable": True, "cone_orders": [], "boundary_count": 3, "k": 1},
        "blow": {"s": [{"gap": [1, 0], "fixed_points": DA_SPEC}],
                 "u": [{"gap": [2, 0], "fixed_points": DA_SPEC}]},
    },
}

SAMPLE_SIZES = {
    "full": {"pairs": 10_000, "top": 1000, "double": 200, "equivariance": 1000, "elements": 20,
             "omega": 10_000, "cocycle": 50, "core": 10_000, "sequences": 200, "convergence": 100},
    "quick": {"pairs": 1000, "top": 200, "double": 50, "equivariance": 200, "elements": 5,
              "omega": 1000, "cocycle": 10, "core": 1000, "sequences": 40, "convergence": 20},
}


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    signature: OrbifoldSignature
    geometry: GeometryParams = None
    blow_s: list = field(default_factory=list)     # [((i, m), [(position, multiplier), ...])]
    blow_u: list = field(default_factory=list)
    depth: int = 5
    seed: int = 0
    samples: str = "full"
    json_path: str = None
    svg_path: str = None
    name: str = "custom"

    @classmethod
    def from_dict(cls, d, name="custom"):
        if "preset" in d:
            base = dict(PRESETS[d["preset"]])
            base.update({k: v for k, v in d.items() if k != "preset"})
            d, name = base, d["preset"]
        if "signature" not in d:
            raise ConfigError("config needs a [signature] table")
        sig = OrbifoldSignature.from_json(d["signature"])
        geom = None
        if "geometry" in d:
            g = d["geometry"]
            geom = GeometryParams(arrangement=[tuple(t) for t in g["arrangement"]] if g.get("arrangement") else None,
                                  lam=float(g.get("lam", 3.0)), matrices=g.get("matrices"),
                                  offsets=g.get("offsets"), arc_fraction=float(g.get("arc_fraction", 0.35)))
        blow = d.get("blow", {})
        plans = []
        for key in ("s", "u"):
            plan = []
            for entry in blow.get(key, []):
                oid = tuple(int(v) for v in entry["gap"])
                if not 1 <= oid[0] <= sig.boundary_count or not 0 <= oid[1] < sig.k:
                    raise ConfigError(f"blow-up plan references a missing gap orbit {list(oid)}")
                plan.append((oid, [tuple(map(float, p)) for p in entry.get("fixed_points", [])]))
            plans.append(plan)
        if "seed" not in d:
            raise ConfigError("a seed is required for reproducibility")
        out = d.get("outputs", {})
        samples = d.get("samples", "full")
        if samples not in SAMPLE_SIZES:
            raise ConfigError(f"samples must be one of {sorted(SAMPLE_SIZES)}")
        return cls(sig, geom, plans[0], plans[1], int(d.get("depth", 5)), int(d["seed"]), samples,
                   out.get("json"), out.get("svg"), d.get("name", name))

    def to_json(self):
        plan = lambda p: [{"gap": list(o), "fixed_points": [list(t) for t in s]} for o, s in p]
        return {"name": self.name, "signature": self.signature.to_json(), "depth": self.depth,
                "seed": self.seed, "samples": self.samples,
                "blow": {"s": plan(self.blow_s), "u": plan(self.blow_u)}}


def load_config(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if str(path).endswith(".json"):
        d = json.loads(raw)
    else:
        d = tomllib.loads(raw.decode("utf-8"))
    return ScenarioConfig.from_dict(d)


def expected_chain_counts(cfg):
    """Elementary lozenges per period for each boundary chain, from the plans alone."""
    k = cfg.signature.k
    s = {o: len(p) for o, p in cfg.blow_s}
    u = {o: len(p) for o, p in cfg.blow_u}
    return {i: sum(2 + s.get((i, m), 0) + u.get((i, (m + 1) % k), 0) for m in range(k))
            for i in range(1, cfg.signature.boundary_count + 1)}


def run_scenario(cfg, seed=None):
    """Return (report dict, svg bytes or None, exit code)."""
    seed = cfg.seed if seed is None else seed
    sz = SAMPLE_SIZES[cfg.samples]
    timing = {}
    t0 = time.perf_counter()
    report = {"schemaVersion": SCHEMA_VERSION, "scenario": cfg.to_json(), "seed": seed}
    try:
        rho0, cert = build_fuchsian(cfg.signature, cfg.geometry)
        msa = compute_minimal_set(rho0, cfg.depth)
        attach_gaps(rho0, msa)
        msa = compute_minimal_set(rho0, cfg.depth)     # on the tight arcs, comparable across blow-ups
        rho1 = hyperbolic_blow_up(rho0, cfg.blow_s)
        rho2 = hyperbolic_blow_up(rho0, cfg.blow_u)
        timing["build"] = time.perf_counter() - t0
        t = time.perf_counter()
        space = None
        if cfg.signature.orientable:
            space = build_orbit_space(rho0, rho1, rho2, seed=seed)
            other = build_orbit_space(rho0, rho1, rho2, seed=seed + 1)
        timing["orbitSpace"] = time.perf_counter() - t
    except (ConstructionRejected, ProfileError, SignatureError) as e:
        module = getattr(e, "module", "blowup" if isinstance(e, ProfileError) else "presentation")
        report["rejected"] = {"module": module, "message": str(e)}
        return report, None, EXIT_REJECTED

    report["gapTable"] = [g.to_json() for g in rho0.gap_table]
    report["certificate"] = cert.to_json()
    checks = []
    t = time.perf_counter()
    bad = check_dichotomy(rho0, rho0.gap_table)
    checks.append(verify.CheckResult("gapDichotomy", not bad, "generator images of gaps are gaps or disjoint from them",
                                     {"violations": len(bad)}))
    msa1 = compute_minimal_set(rho1, cfg.depth)
    msa2 = compute_minimal_set(rho2, cfg.depth)
    stab = max(float(np.max(np.abs(m.cover - msa.cover))) if m.cover.shape == msa.cover.shape else np.inf
               for m in (msa1, msa2))
    checks.append(verify.CheckResult("minimalSetStable", stab < 1e-9, "blow-ups leave the minimal set unchanged",
                                     {"maxEndpointShift": stab}))
    for label, r in (("rho1", rho1), ("rho2", rho2)):
        c = verify.audit_fixed_points(r, seed=seed)
        c.name = f"fixedPointAudit[{label}]"
        checks.append(c)
        c, _ = verify.check_almost_convergence(r, count=sz["sequences"], seed=seed)
        c.name = f"almostKConvergence[{label}]"
        checks.append(c)
        c = verify.check_characterization_conditions(r, seed=seed)
        c.name = f"characterization[{label}]"
        checks.append(c)
    checks.append(verify.check_k_convergence(rho0, samples=sz["convergence"], seed=seed, msa=msa))
    timing["representationChecks"] = time.perf_counter() - t
    chains = []
    if space is not None:
        t = time.perf_counter()
        chains = space.chains()
        report["chains"] = [c.to_json() for c in chains]
        checks.append(verify.check_chains(space, expected_chain_counts(cfg)))
        checks.append(verify.check_boundary_maps(space, n=sz["equivariance"], n_words=sz["elements"], seed=seed))
        checks.append(verify.check_axis_lemmas(space, n_pairs=sz["pairs"], n_top=sz["top"],
                                               n_double=sz["double"], seed=seed))
        checks.append(verify.check_semiconjugacies(space, n=sz["equivariance"], n_words=sz["elements"],
                                                   n_omega=sz["omega"], seed=seed))
        checks.append(verify.check_plane_action(space, n=sz["equivariance"], seed=seed))
        checks.append(verify.check_flow_cocycle(space, n=sz["cocycle"], seed=seed))
        checks.append(verify.check_core_invariance(space, other, n=sz["core"], seed=seed))
        timing["modelChecks"] = time.perf_counter() - t
    else:
        report["chains"] = []
        report["orbitSpace"] = {"skipped": "the planar model is built for orientable orbifolds only"}
    report["checks"] = [c.to_json() for c in checks]
    svg = render_omega(space, chains, msa, k=cfg.signature.k, title=cfg.name)
    timing["total"] = time.perf_counter() - t0
    report["timing"] = timing
    failed = [c.name for c in checks if c.mandatory and not c.passed]
    report["failed"] = failed
    return report, svg, EXIT_CHECK if failed else EXIT_OK


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


@click.group()
def main():
    """Circle actions, hyperbolic blow-ups and lozenge models."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="TOML or JSON scenario file.")
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None, help="Run a built-in scenario.")
@click.option("--svg", "svg_out", type=click.Path(dir_okay=False), default=None, help="Write the SVG here.")
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None, help="Write the report here.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--samples", type=click.Choice(sorted(SAMPLE_SIZES)), default=None, help="Sample-size profile.")
def run(config_path, preset, svg_out, json_out, seed, samples):
    """Run one scenario and report its checks."""
    if (config_path is None) == (preset is None):
        raise click.UsageError("give exactly one of --config and --preset")
    try:
        cfg = load_config(config_path) if config_path else ScenarioConfig.from_dict({"preset": preset, "seed": 0})
    except (ConfigError, SignatureError, KeyError, ValueError, TypeError) as e:
        click.echo(f"construction rejected in cli: invalid config: {e}", err=True)
        sys.exit(EXIT_REJECTED)
    if samples:
        cfg.samples = samples
    report, svg, code = run_scenario(cfg, seed)
    json_out = json_out or cfg.json_path
    svg_out = svg_out or cfg.svg_path
    if json_out:
        with open(json_out, "w") as fh:
            fh.write(dumps(report))
    if svg_out and svg is not None:
        with open(svg_out, "wb") as fh:
            fh.write(svg)
    if code == EXIT_REJECTED:
        r = report["rejected"]
        click.echo(f"construction rejected in {r['module']}: {r['message']}", err=True)
    else:
        for c in report["checks"]:
            note = "" if c["mandatory"] else "  (informational)"
            click.echo(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}{note}")
        click.echo(f"total {report['timing']['total']:.1f} s")
    sys.exit(code)


@main.group()
def presets():
    """Built-in scenarios."""


@presets.command("list")
def presets_list():
    for name, p in PRESETS.items():
        click.echo(f"{name:12s} {p['description']}")


@presets.command("show")
@click.argument("name", type=click.Choice(sorted(PRESETS)))
def presets_show(name):
    click.echo(json.dumps({"preset": name, "seed": 0}, indent=2))
