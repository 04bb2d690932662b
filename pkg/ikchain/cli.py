"""Command line interface: ``ikchain <subcommand> [flags]``

Subcommands:

    verify    algebraic identities, eigenvalue relations, Hamiltonian equivalence
    spectrum  exact diagonalization of the open or periodic chain
    zeroes    zeroes of eigenvalues, solved Bethe ansatz equations, patterns
    surface   closed-form surface energy; finite-size extrapolations with --n-list
    excite    boundary excitation energies; finite-size check with --n-list
    sweep     surface and excitation energies over a grid of eps and eps'

Settings come from flags, then from a ``--config`` file of ``key = value``
lines, then from defaults. Exit codes: 0 success, 1 a residual or comparison
above tolerance, 2 a solver did not converge, 3 invalid configuration.
"""

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lax, spectrum, thermo, zeroes
from .errors import ConfigError, ConvergenceError, DomainError, HomogeneityError, IKChainError, SizeCapError
from .timer import Timer

log = logging.getLogger(__name__)

SCHEMA = 1
EXIT_OK, EXIT_RESIDUAL, EXIT_CONVERGENCE, EXIT_CONFIG = 0, 1, 2, 3

RELATION_TOL = 1e-8
HAMILTONIAN_TOL = 1e-7
BULK_CHECK_TOL = 1e-3

SUBCOMMANDS = ("verify", "spectrum", "zeroes", "surface", "excite", "sweep")

SWEEP_COLUMNS = (
    "eps", "eps_prime", "regime", "E_b", "e_b(chi+)", "e_b(chi-)", "e_b0",
    "inner(chi1)", "inner(chi2)", "delta_e(chi+)", "delta_e(chi-)",
)


def _float_list(text):
    return tuple(float(x) for x in str(text).replace(" ", "").split(",") if x)


def _int_list(text):
    return tuple(int(x) for x in str(text).replace(" ", "").split(",") if x)


def _int_or_list(value):
    return value if isinstance(value, tuple) else _int_list(value)


def _float_or_list(value):
    return value if isinstance(value, tuple) else _float_list(value)


def _bool(text):
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"'{text}' is not a boolean")


def _range(text):
    """'start:stop:count' -> evenly spaced values"""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like start:stop:count, not '{text}'")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError(f"range count must be positive, not {count}")
    return tuple(float(x) for x in np.linspace(start, stop, count))


@dataclass
class RunConfig:
    """Settings for one command line run"""

    subcommand: str = "verify"
    eta: float = 0.35
    eps: float = 2.0
    eps_prime: float = 0.3
    sigma: float = 0.6
    sigma_prime_bar: float = 0.7
    n: int = 2
    thetas: tuple = ()
    tol: float = 1e-10
    bae_tol: float = zeroes.BAE_TOL
    series_tol: float = thermo.SERIES_TOL
    compare_tol: float = 1e-2
    seed: int = 7
    out: str = None
    format: str = "json"
    n_list: tuple = ()
    which: str = None
    points: int = 100
    states: tuple = ()
    periodic: bool = False
    channel: str = "-"
    bulk_check: bool = False
    eps_range: tuple = ()
    eps_prime_range: tuple = ()
    cache_dir: str = None
    workers: int = 1

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"Unknown subcommand '{self.subcommand}'")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be 'json' or 'csv', not '{self.format}'")
        if self.which is not None and self.which not in lax.IDENTITIES:
            raise ConfigError(f"which must be one of {', '.join(lax.IDENTITIES)}, not '{self.which}'")
        if self.channel not in ("+", "-"):
            raise ConfigError(f"channel must be '+' or '-', not '{self.channel}'")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, not {self.workers}")
        if self.points < 1:
            raise ConfigError(f"points must be at least 1, not {self.points}")
        if any(n < 1 for n in self.n_list):
            raise ConfigError(f"chain lengths must be positive: {self.n_list}")
        self.n_list = tuple(sorted(self.n_list))
        try:
            self.params
        except ValueError as error:
            raise ConfigError(f"invalid model parameters: {error}") from error

    @property
    def params(self):
        return lax.ModelParams(
            eta=self.eta,
            eps=self.eps,
            eps_prime=self.eps_prime,
            sigma_l=self.sigma,
            sigma_r_bar=self.sigma_prime_bar,
            n_sites=self.n,
            thetas=self.thetas,
        )

    def to_dict(self) -> dict:
        values = dataclasses.asdict(self)
        return {key: list(value) if isinstance(value, tuple) else value for key, value in values.items()}


_PARSERS = {
    "eta": float, "eps": float, "eps_prime": float, "sigma": float, "sigma_prime_bar": float,
    "n": int, "thetas": _float_or_list, "tol": float, "bae_tol": float, "series_tol": float,
    "compare_tol": float, "seed": int, "out": str, "format": str, "n_list": _int_or_list,
    "which": str, "points": int, "states": _int_or_list, "periodic": _bool, "channel": str,
    "bulk_check": _bool, "eps_range": lambda v: v if isinstance(v, tuple) else _range(v),
    "eps_prime_range": lambda v: v if isinstance(v, tuple) else _range(v),
    "cache_dir": str, "workers": int,
}


def read_config_file(path):
    """Reads flat ``key = value`` settings; '#' starts a comment

    Keys are long flag names with dashes or underscores.

    Raises:
        ConfigError: For unreadable files, malformed lines, unknown keys or bad values
    """
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as error:
        raise ConfigError(f"Cannot read config file '{path}': {error}") from error

    values = {}
    for number, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{number}: unknown setting '{key}'")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as error:
            raise ConfigError(f"{path}:{number}: bad value for '{key}': {error}") from error
    return values


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of 'key = value' settings")
    common.add_argument("--eta", type=float, help="crossing parameter, > 0")
    common.add_argument("--eps", type=float, help="left boundary field parameter epsilon")
    common.add_argument("--eps-prime", type=float, help="right boundary field parameter epsilon'")
    common.add_argument("--sigma", type=float, help="left boundary angle in (-pi, pi]")
    common.add_argument("--sigma-prime-bar", type=float, help="real part of the right boundary angle")
    common.add_argument("--n", type=int, help="chain length")
    common.add_argument("--thetas", type=_float_list, help="comma separated theta_bar_j")
    common.add_argument("--tol", type=float, help="residual tolerance for identities")
    common.add_argument("--bae-tol", type=float, help="Newton tolerance for the Bethe ansatz equations")
    common.add_argument("--series-tol", type=float, help="tail tolerance for thermodynamic series")
    common.add_argument("--compare-tol", type=float, help="tolerance of extrapolated against closed form")
    common.add_argument("--seed", type=int, help="seed for random verification points")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--n-list", type=_int_list, help="comma separated chain lengths")
    common.add_argument("--cache-dir", help="directory for cached eigenvectors")
    common.add_argument("--workers", type=int, help="worker processes (1 runs in-process)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="ikchain", description="Izergin-Korepin open chain solver")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    verify = sub.add_parser("verify", parents=[common], help="check identities and eigenvalue relations")
    verify.add_argument("--which", choices=lax.IDENTITIES, help="only this identity")
    verify.add_argument("--points", type=int, help="random points per identity")

    spectra = sub.add_parser("spectrum", parents=[common], help="exact diagonalization")
    spectra.add_argument("--periodic", action="store_const", const=True)
    spectra.add_argument("--states", type=_int_list, help="states that get eigenvalue curves")

    zero = sub.add_parser("zeroes", parents=[common], help="zeroes and Bethe ansatz solutions")
    zero.add_argument("--periodic", action="store_const", const=True)
    zero.add_argument("--states", type=_int_list, help="states to extract (default: ground state)")

    surface = sub.add_parser("surface", parents=[common], help="surface energy")
    surface.add_argument("--bulk-check", action="store_const", const=True,
                         help="compare periodic ED energies per site with the bulk series")

    excite = sub.add_parser("excite", parents=[common], help="boundary excitation energies")
    excite.add_argument("--channel", choices=("+", "-"), help="boundary of the finite-size check")

    sweep = sub.add_parser("sweep", parents=[common], help="energies over a parameter grid")
    sweep.add_argument("--eps-range", type=_range, help="start:stop:count")
    sweep.add_argument("--eps-prime-range", type=_range, help="start:stop:count")
    return parser


def config_from_args(args):
    """Merges flags over config file values over defaults"""
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for name in _PARSERS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    try:
        return RunConfig(subcommand=args.subcommand, **values)
    except (TypeError, ValueError) as error:
        raise ConfigError(str(error)) from error


def _pool_map(func, items, workers):
    """Maps over items in-process or on a process pool, keeping input order"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _complex_pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def _cache(config):
    return spectrum.SpectrumCache(config.cache_dir) if config.cache_dir else None


@dataclass
class RunResult:
    """Payload of one run plus the exit code it earns"""

    payload: dict
    rows: list = field(default_factory=list)
    columns: tuple = ()
    exit_code: int = EXIT_OK


def run_verify(config):
    """Algebraic identities at random points, then per-state checks at N <= 3"""
    params = config.params
    rng = np.random.default_rng(config.seed)
    which = (config.which,) if config.which else lax.IDENTITIES

    identities = {}
    failed = []
    for name in which:
        points = lax.random_points(rng, lax.ARITY[name], config.points)
        report = lax.verify_identity(name, params, points)
        passed = bool(report.passed(config.tol))
        identities[name] = {"max_residual": float(report.max_residual), "passed": passed}
        log.debug("%s: max residual %.3e", name, report.max_residual)
        if not passed:
            failed.append(name)

    payload = {"identities": identities}
    rows = [{"check": name, "max_residual": v["max_residual"], "passed": v["passed"]} for name, v in identities.items()]

    if config.which is None and params.n_sites <= 3:
        result = spectrum.diagonalize(params, cache=_cache(config))
        relations = spectrum.check_functional_relations(result)
        state, relation, worst = relations.worst()
        payload["relations"] = {"max_residual": worst, "worst_state": state, "worst_relation": relation}
        rows.append({"check": "relations", "max_residual": worst, "passed": worst < RELATION_TOL})
        if worst >= RELATION_TOL:
            failed.append(f"relation {relation} (state {state})")

        if params.homogeneous:
            gap = float(np.max(np.abs(
                spectrum.hamiltonian_explicit(params) - spectrum.hamiltonian_from_transfer(params)
            )))
            payload["hamiltonian"] = {"max_difference": gap}
            rows.append({"check": "hamiltonian", "max_residual": gap, "passed": gap < HAMILTONIAN_TOL})
            if gap >= HAMILTONIAN_TOL:
                failed.append("hamiltonian")

    payload["failed"] = failed
    for name in failed:
        log.error("verification failed: %s", name)
    return RunResult(payload, rows, ("check", "max_residual", "passed"), EXIT_RESIDUAL if failed else EXIT_OK)


def run_spectrum(config):
    kind = spectrum.PERIODIC if config.periodic else spectrum.OPEN
    result = spectrum.diagonalize(config.params, kind, states=config.states or None, cache=_cache(config))
    rows = [
        {"index": i, "energy": float(e), "imaginary": float(im)}
        for i, (e, im) in enumerate(zip(result.energies, result.imaginary_parts))
    ]
    payload = {
        "boundary_kind": kind,
        "dimension": result.dimension,
        "ground_energy": float(result.energies[result.ground_index]),
        "energies": [float(e) for e in result.energies],
        "u_grid": [_complex_pair(u) for u in result.u_grid],
        "curves": {str(s): [_complex_pair(v) for v in result.lambda_curves[i]] for i, s in enumerate(result.states)},
    }
    return RunResult(payload, rows, ("index", "energy", "imaginary"))


def run_zeroes(config):
    """Zeroes of the requested states; long chains go through continuation in N"""
    params = config.params
    states = config.states or (0,)

    if config.periodic:
        result = spectrum.diagonalize(params, spectrum.PERIODIC, states=states, cache=_cache(config))
        entries = {}
        for state in states:
            zset = zeroes.extract_periodic_zeroes(result.curve(state), params)
            entries[str(state)] = dict(
                zset.to_dict(),
                energy=zeroes.periodic_energy_from_zeroes(zset),
                ed_energy=float(result.energies[state]),
            )
        return RunResult({"boundary_kind": spectrum.PERIODIC, "states": entries})

    if params.n_sites > zeroes.ED_LIMIT:
        solved = {0: zeroes.ground_state_zeroes(params, tol=config.bae_tol)}
        ed_energies = {}
    else:
        result = spectrum.diagonalize(params, states=states, cache=_cache(config))
        solved = {}
        for state in states:
            extracted = zeroes.extract_zeroes(result.curve(state), params)
            solved[state] = zeroes.solve_bae(extracted, params, tol=config.bae_tol)
        ed_energies = {state: float(result.energies[state]) for state in states}

    entries, rows = {}, []
    for state, zset in solved.items():
        report = zeroes.classify_pattern(zset, params)
        residual = float(np.max(np.abs(zeroes.bae_residual(zset, params))))
        entry = dict(
            report.zset.to_dict(),
            energy=zeroes.energy_from_zeroes(zset),
            bae_residual=residual,
            pattern=report.to_dict(),
        )
        if state in ed_energies:
            entry["ed_energy"] = ed_energies[state]
        entries[str(state)] = entry
        for re, im, tag in report.zset.plot_points():
            rows.append({"state": state, "re_zbar": re, "im_zbar": im, "tag": tag})
    payload = {"boundary_kind": spectrum.OPEN, "regime": zeroes.regime_of(params), "states": entries}
    return RunResult(payload, rows, ("state", "re_zbar", "im_zbar", "tag"))


def _solve_ground(params, bae_tol):
    """Ground-state zeroes from the regime seed, with continuation in N as fallback"""
    return zeroes.ground_state_zeroes(params, tol=bae_tol)


def _surface_point(job):
    """(N, E_g, E_b) or (N, None, None) for one size; runs in a worker"""
    params, bae_tol, bulk = job
    try:
        with Timer(f"surface N={params.n_sites}") as timer:
            ground = zeroes.energy_from_zeroes(_solve_ground(params, bae_tol))
    except IKChainError as error:
        log.warning("N=%d failed: %s", params.n_sites, error)
        return params.n_sites, None, None
    log.info("ground state N=%d solved in %.3fs", params.n_sites, timer.time)
    return params.n_sites, ground, ground - 2 * params.n_sites * bulk


def _extrapolate_rows(rows, value_key):
    good = [r for r in rows if r["status"] == "ok"]
    if len(good) < 3:
        raise ConvergenceError(f"only {len(good)} of {len(rows)} sizes converged; need ≥ 3 sizes")
    return thermo.extrapolate_in_inverse_size([r["n"] for r in good], [r[value_key] for r in good])


def run_surface_extrapolation(config):
    """Finite-size surface energies E_g(N) - 2N e_p extrapolated in 1/N"""
    if len(config.n_list) < 3:
        raise ConfigError(f"need ≥ 3 sizes for an extrapolation, got {list(config.n_list)}")
    params = config.params
    if not params.homogeneous:
        raise ConfigError("finite-size extrapolation needs the homogeneous chain")

    bulk = thermo.bulk_energy_periodic(params.eta, config.series_tol).value
    jobs = [(params.replace(n_sites=n), config.bae_tol, bulk) for n in config.n_list]
    rows = []
    for n, ground, surface in sorted(_pool_map(_surface_point, jobs, config.workers), key=lambda r: r[0]):
        rows.append({"n": n, "E_g": ground, "E_b": surface, "status": "ok" if ground is not None else "failed"})

    estimate, spread = _extrapolate_rows(rows, "E_b")
    closed = thermo.surface_energy(params, config.series_tol)
    difference = abs(estimate - closed.surface_energy)
    payload = {
        "finite_size": rows,
        "extrapolated": estimate,
        "uncertainty": spread,
        "closed_form": closed.to_dict(),
        "difference": difference,
        "passed": difference < config.compare_tol,
    }
    code = EXIT_OK if difference < config.compare_tol else EXIT_RESIDUAL
    return RunResult(payload, rows, ("n", "E_g", "E_b", "status"), code)


def _periodic_point(job):
    params, cache_dir = job
    cache = spectrum.SpectrumCache(cache_dir) if cache_dir else None
    result = spectrum.diagonalize(params, spectrum.PERIODIC, states=[0], cache=cache)
    return params.n_sites, float(result.energies[result.ground_index])


def run_bulk_check(config):
    """Periodic ground energies per site against 2 e_p"""
    sizes = config.n_list or (4, 6, 8)
    if len(sizes) < 3:
        raise ConfigError(f"need ≥ 3 sizes for an extrapolation, got {list(sizes)}")
    if any(n % 2 for n in sizes):
        raise ConfigError(f"bulk check sizes must be even, got {list(sizes)}")

    params = config.params
    jobs = [(params.replace(n_sites=n), config.cache_dir) for n in sizes]
    rows = [
        {"n": n, "E_p": energy, "per_site": energy / n, "status": "ok"}
        for n, energy in sorted(_pool_map(_periodic_point, jobs, config.workers))
    ]
    estimate, spread = _extrapolate_rows(rows, "per_site")
    series = thermo.bulk_energy_periodic(params.eta, config.series_tol)
    difference = abs(estimate - 2 * series.value)
    payload = {
        "finite_size": rows,
        "extrapolated": estimate,
        "uncertainty": spread,
        "series": 2 * series.value,
        "tail_bound": series.tail_bound,
        "difference": difference,
        "passed": difference < BULK_CHECK_TOL,
    }
    code = EXIT_OK if difference < BULK_CHECK_TOL else EXIT_RESIDUAL
    return RunResult(payload, rows, ("n", "E_p", "per_site", "status"), code)


def run_surface(config):
    if config.bulk_check:
        return run_bulk_check(config)
    if config.n_list:
        return run_surface_extrapolation(config)
    report = thermo.surface_energy(config.params, config.series_tol)
    row = dict(report.breakdown, regime=report.regime, E_b=report.surface_energy)
    return RunResult({"surface": report.to_dict()}, [row], ("regime", "E_b") + tuple(report.breakdown))


def _excitation_point(job):
    params, bae_tol, channel = job
    try:
        ground = _solve_ground(params, bae_tol)
        excited = zeroes.solve_bae(zeroes.seed_boundary_excitation(ground, params, channel), params, tol=bae_tol)
    except IKChainError as error:
        log.warning("excitation at N=%d failed: %s", params.n_sites, error)
        return params.n_sites, None
    return params.n_sites, zeroes.energy_from_zeroes(excited) - zeroes.energy_from_zeroes(ground)


def run_excite(config):
    """Excitation menu with closed-form energies, and the finite-size check with --n-list"""
    params = config.params
    menu = thermo.excitation_menu(params)
    entries = []
    for item in menu:
        value = None
        if item.admissible:
            chis = [params.chi_plus if c == "+" else params.chi_minus for c in item.channels]
            value = float(sum(thermo.excitation_energy(chi, params.eta, config.series_tol).value for chi in chis))
        entries.append({"label": item.label, "admissible": item.admissible, "note": item.note, "delta_e": value})

    payload = {"regime": zeroes.regime_of(params), "excitations": entries}
    rows = list(entries)
    columns = ("label", "admissible", "note", "delta_e")
    code = EXIT_OK

    if config.n_list:
        if len(config.n_list) < 3:
            raise ConfigError(f"need ≥ 3 sizes for an extrapolation, got {list(config.n_list)}")
        chi = params.chi_plus if config.channel == "+" else params.chi_minus
        closed = thermo.excitation_energy(chi, params.eta, config.series_tol).value
        jobs = [(params.replace(n_sites=n), config.bae_tol, config.channel) for n in config.n_list]
        rows = [
            {"n": n, "delta_e": value, "status": "ok" if value is not None else "failed"}
            for n, value in sorted(_pool_map(_excitation_point, jobs, config.workers), key=lambda r: r[0])
        ]
        columns = ("n", "delta_e", "status")
        estimate, spread = _extrapolate_rows(rows, "delta_e")
        difference = abs(estimate - closed)
        payload["finite_size"] = {
            "channel": config.channel,
            "rows": rows,
            "extrapolated": estimate,
            "uncertainty": spread,
            "closed_form": closed,
            "difference": difference,
            "passed": difference < config.compare_tol,
        }
        code = EXIT_OK if difference < config.compare_tol else EXIT_RESIDUAL
    return RunResult(payload, rows, columns, code)


def _sweep_row(job):
    params, tol = job
    report = thermo.surface_energy(params, tol)
    row = {column: None for column in SWEEP_COLUMNS}
    row.update(eps=params.eps, eps_prime=params.eps_prime, regime=report.regime, E_b=report.surface_energy)
    row.update(report.breakdown)
    for channel, chi in (("+", params.chi_plus), ("-", params.chi_minus)):
        if chi < 3 * params.eta:
            row[f"delta_e(chi{channel})"] = thermo.excitation_energy(chi, params.eta, tol).value
    return row


def run_sweep(config):
    params = config.params
    eps_values = config.eps_range or (params.eps,)
    eps_prime_values = config.eps_prime_range or (params.eps_prime,)
    jobs = [
        (params.replace(eps=e, eps_prime=ep), config.series_tol)
        for e in eps_values for ep in eps_prime_values
    ]
    rows = sorted(_pool_map(_sweep_row, jobs, config.workers), key=lambda r: (r["eps"], r["eps_prime"]))
    return RunResult({"sweep": rows}, rows, SWEEP_COLUMNS)


RUNNERS = {
    "verify": run_verify,
    "spectrum": run_spectrum,
    "zeroes": run_zeroes,
    "surface": run_surface,
    "excite": run_excite,
    "sweep": run_sweep,
}


def _tolerances(config):
    return {
        "algebra": config.tol,
        "bae": config.bae_tol,
        "series": config.series_tol,
        "comparison": config.compare_tol,
    }


def render(result, config):
    """JSON document or CSV table for a run, deterministic for identical input

    CSV output starts with a '#' line carrying the schema, subcommand and
    tolerances.
    """
    if config.format == "csv":
        buffer = io.StringIO()
        meta = " ".join(f"{name}={value!r}" for name, value in _tolerances(config).items())
        buffer.write(f"# {SCHEMA} {config.subcommand} tolerances: {meta}\n")
        writer = csv.DictWriter(buffer, fieldnames=list(result.columns), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in result.rows:
            writer.writerow(row)
        return buffer.getvalue()

    document = {
        "schema": SCHEMA,
        "subcommand": config.subcommand,
        "params": config.params.to_dict(),
        "regime": zeroes.regime_of(config.params),
        "tolerances": _tolerances(config),
        "results": result.payload,
        "exit_code": result.exit_code,
    }
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit:
        # argparse has already printed usage or help
        return EXIT_CONFIG if exit.code else EXIT_OK

    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        config = config_from_args(args)
        with Timer(config.subcommand) as timer:
            result = RUNNERS[config.subcommand](config)
        log.info("%s finished in %.3fs", config.subcommand, timer.time)
        _write(render(result, config), config.out)
        return result.exit_code
    except ConfigError as error:
        log.error("%s", error)
        return EXIT_CONFIG
    except ConvergenceError as error:
        log.error("%s", error)
        return EXIT_CONVERGENCE
    except (SizeCapError, HomogeneityError, DomainError) as error:
        log.error("%s", error)
        return EXIT_CONFIG
    except IKChainError as error:
        log.error("%s", error)
        return EXIT_RESIDUAL


if __name__ == "__main__":
    sys.exit(main())
