"""Command line entry point ``blochsim``.

Exit status: 0 success, 2 invalid input, 3 resource cap exceeded, 4 I/O error.
Options may also come from a JSON file given with ``--config``; explicit
flags win over the file, which wins over built-in defaults.  A config file
may hold flat keys or a section per command name.
"""

import argparse
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bloch import is_valid_state, purity
from .evolution import evolution_matrix, precession_hamiltonian
from .exceptions import BlochSimError, ResourceCapError, ValidationError
from .generators import basis_to_dict, build_generators
from .io import (
    content_hash,
    csv_text,
    density_from_dict,
    dumps,
    file_hash,
    format_number,
    load_json,
    matrix_from_json,
    matrix_to_json,
    observable_from_dict,
    observable_to_dict,
    state_from_dict,
    write_atomic,
)
from .membrane import (
    DEFAULT_SCHEDULE,
    DEFAULT_SEED,
    RngSpec,
    default_workers,
    estimate_probabilities,
    run_measurement,
)
from .nonuniform import epsilon_probability
from .observables import observable_from_matrix
from .simplex import (
    face_volume_closed,
    inradius,
    simplex_volume_cayley_menger,
    simplex_volume_closed,
)
from .universal import ENUMERATION_CAP, average_profile, identity_check, uniform_reference

EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_IO = 0, 2, 3, 4

DEFAULTS = {
    "gens": {"n": None, "out": None},
    "map": {"state": None, "out": None},
    "measure": {"state": None, "observable": None, "samples": 100_000, "seed": DEFAULT_SEED,
                "stream": 0, "density": "uniform", "out_dir": "."},
    "trace": {"state": None, "observable": None, "seed": DEFAULT_SEED, "stream": 0,
              "schedule": list(DEFAULT_SCHEDULE), "points": 32, "out": None},
    "universal": {"n": None, "i": None, "scan": False, "workers": 1},
    "identities": {"n_max": 256},
    "simplex": {"n": None},
    "evolve": {"hamiltonian": None, "precession": None, "omega": 1.0, "t": None,
               "format": "json", "out": None},
    "epsilon_scan": {"eps": None, "xp": None, "eps_steps": 11, "xp_steps": 21, "out": None},
}


def _emit(text, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_gens(o):
    if o.n is None:
        raise ValidationError("--n is required")
    _emit(dumps(basis_to_dict(build_generators(int(o.n)))), o.out)


def cmd_map(o):
    D, r = state_from_dict(load_json(_required(o, "state")))
    ok, lam = is_valid_state(r)
    doc = {"N": int(D.shape[0]), "bloch": r, "matrix": matrix_to_json(D),
           "purity": purity(r), "valid": bool(ok), "min_eigenvalue": lam}
    _emit(dumps(doc), o.out)


def _required(o, name):
    value = getattr(o, name)
    if value is None:
        raise ValidationError(f"--{name.replace('_', '-')} is required")
    return value


def _load_density(source):
    if source in (None, "uniform"):
        return None
    return density_from_dict(load_json(source))


def cmd_measure(o):
    state_doc = load_json(_required(o, "state"))
    obs_doc = load_json(_required(o, "observable"))
    _, r = state_from_dict(state_doc)
    obs = observable_from_dict(obs_doc)
    if obs.N * obs.N - 1 != r.size:
        raise ValidationError("state and observable dimensions differ")
    density = _load_density(o.density)
    rng = RngSpec(int(o.seed), int(o.stream))
    report = estimate_probabilities(r, obs, int(o.samples), rng, default_workers(), density)
    freq_doc = {
        "seed": rng.seed,
        "stream": rng.stream_id,
        "samples": report.samples,
        "partition": [list(g) for g in obs.partition],
        "counts": report.counts,
        "frequencies": report.frequencies,
        "born_reference": report.born,
        "z_scores": report.z_scores,
        "resamples": report.resamples,
    }
    os.makedirs(o.out_dir, exist_ok=True)
    freq_path = os.path.join(o.out_dir, "frequencies.json")
    freq_text = dumps(freq_doc)
    write_atomic(freq_path, freq_text)
    manifest = {
        "command": "measure",
        "parameters": {"samples": report.samples, "density": o.density, "stream": rng.stream_id,
                       "state": os.path.basename(o.state), "observable": os.path.basename(o.observable)},
        "seed": rng.seed,
        "samples": report.samples,
        "observable_hash": content_hash(observable_to_dict(obs)),
        "state_hash": content_hash(state_doc),
        "density_hash": None if density is None else content_hash(density.to_dict()),
        "frequencies": report.frequencies,
        "born_reference": report.born,
        "z_scores": report.z_scores,
        "resamples": report.resamples,
        "versions": {"blochsim": __version__, "numpy": np.__version__},
        "outputs": [{"path": "frequencies.json", "sha256": file_hash(freq_path)}],
    }
    write_atomic(os.path.join(o.out_dir, "manifest.json"), dumps(manifest))
    for k, g in enumerate(obs.partition):
        print(f"outcome {k} {list(g)}: frequency {format_number(report.frequencies[k])} "
              f"born {format_number(report.born[k])} z {format_number(report.z_scores[k])}")


def cmd_trace(o):
    _, r = state_from_dict(load_json(_required(o, "state")))
    obs = observable_from_dict(load_json(_required(o, "observable")))
    if obs.N * obs.N - 1 != r.size:
        raise ValidationError("state and observable dimensions differ")
    schedule = [float(x) for x in o.schedule]
    points = int(o.points)
    if points < 1:
        raise ValidationError("--points must be >= 1")
    k, trace = run_measurement(r, obs, RngSpec(int(o.seed), int(o.stream)), schedule)
    header = ["t"] + [f"r_{j + 1}" for j in range(r.size)] + ["phase"]
    rows = [[t] + list(v) + [phase] for t, v, phase in trace.sample(points)]
    _emit(csv_text(header, rows), o.out)
    print(f"outcome {k} {list(obs.partition[k])}, resamples {trace.resamples}", file=sys.stderr)


def cmd_universal(o):
    n = int(_required(o, "n"))
    if n > ENUMERATION_CAP:
        raise ResourceCapError(f"n = {n} exceeds the enumeration cap {ENUMERATION_CAP}; "
                               f"the closed form gives (n - i)/n")
    profile = average_profile(n, int(o.workers))
    if o.scan:
        rows = [[i, profile[i], uniform_reference(n, i), profile[i] == uniform_reference(n, i)]
                for i in range(n + 1)]
        sys.stdout.write(csv_text(["i", "average", "uniform", "equal"],
                                  [[str(c) if isinstance(c, bool) else c for c in row] for row in rows]))
        return
    i = int(_required(o, "i"))
    if not 0 <= i <= n:
        raise ValidationError(f"--i must lie in 0..{n}")
    print(format_number(profile[i]))
    print(f"uniform {format_number(uniform_reference(n, i))}", file=sys.stderr)


def cmd_identities(o):
    n_max = int(o.n_max)
    if n_max < 0:
        raise ValidationError("--n-max must be >= 0")
    rows, ok = [], True
    for n in range(n_max + 1):
        rep = identity_check(n)
        ok &= rep.holds
        rows.append([n, rep.weighted_lhs, rep.weighted_rhs, rep.plain_lhs, rep.plain_rhs, str(rep.holds)])
    sys.stdout.write(csv_text(["n", "weighted_lhs", "weighted_rhs", "plain_lhs", "plain_rhs", "holds"], rows))
    if not ok:
        raise ValidationError("an identity failed")


def cmd_simplex(o):
    N = int(_required(o, "n"))
    obs = observable_from_matrix(np.diag(np.arange(N, 0, -1.0)))
    doc = {
        "N": N,
        "volume": simplex_volume_closed(N),
        "volume_cayley_menger": simplex_volume_cayley_menger(obs.vertex_vectors),
        "face_volume": face_volume_closed(N),
        "inradius": inradius(N),
        "edge_length": math.sqrt(2 * N / (N - 1)),
        "vertex_angle": math.acos(-1 / (N - 1)),
    }
    sys.stdout.write(dumps(doc))


def cmd_evolve(o):
    t = float(_required(o, "t"))
    if o.hamiltonian is not None:
        doc = load_json(o.hamiltonian)
        if not isinstance(doc, dict) or "matrix" not in doc:
            raise ValidationError("Hamiltonian document needs a 'matrix' entry")
        H = matrix_from_json(doc["matrix"], "Hamiltonian")
    elif o.precession is not None:
        H = precession_hamiltonian(int(o.precession), float(o.omega))
    else:
        raise ValidationError("give --hamiltonian FILE or --precession N")
    V = evolution_matrix(H, t)
    if o.format == "csv":
        text = csv_text([f"c_{j + 1}" for j in range(V.V.shape[1])], V.V.tolist())
    elif o.format == "json":
        text = dumps({"N": V.N, "t": V.t, "V": V.V})
    else:
        raise ValidationError("--format must be csv or json")
    _emit(text, o.out)


def _grid(values, steps, lo, hi):
    if values:
        return [float(Fraction(v)) for v in str(values).split(",")]
    steps = int(steps)
    if steps < 1:
        raise ValidationError("grid needs at least one point")
    return list(np.linspace(lo, hi, steps)) if steps > 1 else [lo]


def cmd_epsilon_scan(o):
    eps = _grid(o.eps, o.eps_steps, 0.0, 1.0)
    xps = _grid(o.xp, o.xp_steps, -1.0, 1.0)
    rows = []
    for e in eps:
        for x in xps:
            rows.append([e, x, epsilon_probability(x, e, at_equilibrium="split").p1])
    _emit(csv_text(["epsilon", "x_p", "P1"], rows), o.out)


COMMANDS = {
    "gens": cmd_gens, "map": cmd_map, "measure": cmd_measure, "trace": cmd_trace,
    "universal": cmd_universal, "identities": cmd_identities, "simplex": cmd_simplex,
    "evolve": cmd_evolve, "epsilon-scan": cmd_epsilon_scan,
}


def build_parser():
    p = argparse.ArgumentParser(prog="blochsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="JSON file with default option values")
        return sp

    sp = add("gens", "export the generator basis as JSON")
    sp.add_argument("--n", type=int)
    sp.add_argument("--out")

    sp = add("map", "convert a state between matrix and Bloch form")
    sp.add_argument("--state")
    sp.add_argument("--out")

    sp = add("measure", "Monte Carlo membrane measurement with a run manifest")
    sp.add_argument("--state")
    sp.add_argument("--observable")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--stream", type=int)
    sp.add_argument("--density", help="'uniform' or a density JSON file (N = 2 only)")
    sp.add_argument("--out-dir", dest="out_dir")

    sp = add("trace", "trajectory of one simulated measurement as CSV")
    sp.add_argument("--state")
    sp.add_argument("--observable")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--stream", type=int)
    sp.add_argument("--schedule", type=float, nargs=5, metavar=("T1", "T2", "T3", "T4", "T5"))
    sp.add_argument("--points", type=int, help="points per segment")
    sp.add_argument("--out")

    sp = add("universal", "exact average over cellular structures")
    sp.add_argument("--n", type=int)
    sp.add_argument("--i", type=int)
    sp.add_argument("--scan", action="store_true", default=None)
    sp.add_argument("--workers", type=int)

    sp = add("identities", "verify the two binomial identities")
    sp.add_argument("--n-max", dest="n_max", type=int)

    sp = add("simplex", "measurement simplex geometry")
    sp.add_argument("--n", type=int)

    sp = add("evolve", "evolution matrix of a Hamiltonian")
    sp.add_argument("--hamiltonian")
    sp.add_argument("--precession", type=int, metavar="N", help="use H = omega S_3 for dimension N")
    sp.add_argument("--omega", type=float)
    sp.add_argument("--t", type=float)
    sp.add_argument("--format", choices=["csv", "json"])
    sp.add_argument("--out")

    sp = add("epsilon-scan", "epsilon-model probabilities on a grid")
    sp.add_argument("--eps", help="comma separated values")
    sp.add_argument("--xp", help="comma separated values")
    sp.add_argument("--eps-steps", dest="eps_steps", type=int)
    sp.add_argument("--xp-steps", dest="xp_steps", type=int)
    sp.add_argument("--out")
    return p


def resolve_options(args):
    """Merge flags, config file and defaults (in that order of priority)."""
    key = args.command.replace("-", "_")
    config = {}
    if args.config:
        raw = load_json(args.config)
        if not isinstance(raw, dict):
            raise ValidationError("config file must hold a JSON object")
        config = {k: v for k, v in raw.items() if not isinstance(v, dict)}
        config.update(raw.get(args.command, raw.get(key, {})) or {})
        config = {k.replace("-", "_"): v for k, v in config.items()}
    opts = argparse.Namespace(command=args.command)
    for name, default in DEFAULTS[key].items():
        value = getattr(args, name, None)
        if value is None:
            value = config.get(name, default)
        setattr(opts, name, value)
    return opts


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        COMMANDS[args.command](opts)
    except ResourceCapError as exc:
        print(f"blochsim: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (BlochSimError, ValueError) as exc:
        print(f"blochsim: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"blochsim: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
