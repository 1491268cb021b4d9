"""Command-line interface. Every subcommand prints one JSON document
(``fuzz`` prints JSON lines).

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _backend
from .errors import MatrixFormatError, MissingProbeError, OracleInconsistentError, TingleyError
from .faces import face_of_element, is_pure_atom
from .generators import (
    GenSpec,
    generate_isometry,
    perturb_oracle,
    random_sphere_point,
    spawn_seeds,
)
from .geometry import (
    PureAtom,
    arazy_slack,
    atom_distance,
    clarkson_mccarthy_gap,
    is_orthogonal,
    trace_norm,
)
from .matrix import haar_unitary, matrix_from_json, matrix_to_json
from .oracle import IsometryVariant, TableOracle, Variant
from .recovery import RESIDUAL_TOL, recover_isometry, verify_sphere_isometry

INEQUALITY_TOL = 1e-9
ORTH_TOL = 1e-8


class InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _load_matrix(path):
    return matrix_from_json(_load_json(path), name=path)


def load_oracle(doc):
    """Build an oracle from its JSON spec.

    Accepted forms: ``{"tag", "u", "v"}`` with matrix-JSON unitaries,
    ``{"tag", "n", "seed"}`` for Haar-drawn unitaries, or
    ``{"table": [{"x", "fx"}, ...]}``. Returns ``(oracle, table_or_None)``.
    """
    if not isinstance(doc, dict):
        raise MatrixFormatError("oracle spec must be a JSON object")
    if "table" in doc:
        rows = doc["table"]
        if not isinstance(rows, list) or not rows:
            raise MatrixFormatError("field 'table' must be a non-empty list")
        pairs = []
        for k, row in enumerate(rows):
            if not isinstance(row, dict) or "x" not in row or "fx" not in row:
                raise MatrixFormatError(f"table[{k}] needs fields 'x' and 'fx'")
            pairs.append((matrix_from_json(row["x"], f"table[{k}].x"),
                          matrix_from_json(row["fx"], f"table[{k}].fx")))
        table = TableOracle(pairs)
        return table.as_oracle(), table
    if "tag" not in doc:
        raise MatrixFormatError("oracle spec needs field 'tag' or 'table'")
    try:
        tag = Variant(doc["tag"])
    except ValueError:
        raise MatrixFormatError(
            f"field 'tag' must be one of {[v.value for v in Variant]}") from None
    if "u" in doc or "v" in doc:
        u = matrix_from_json(doc.get("u"), "u")
        v = matrix_from_json(doc.get("v"), "v")
        return IsometryVariant(tag, u, v).as_oracle(), None
    for key in ("n", "seed"):
        if not isinstance(doc.get(key), int):
            raise MatrixFormatError(f"field '{key}' must be an integer")
    return generate_isometry(GenSpec(tag, doc["n"], doc["seed"])), None


def cmd_norm(args):
    a = _load_matrix(args.matrix)
    return 0, {"trace_norm": trace_norm(a)}


def cmd_distance(args):
    a, b = _load_matrix(args.a), _load_matrix(args.b)
    out = {"distance": trace_norm(a - b)}
    tol = args.tol or 1e-8
    if is_pure_atom(a, tol) and is_pure_atom(b, tol):
        out["atom_formula"] = atom_distance(PureAtom.from_matrix(b, tol), PureAtom.from_matrix(a, tol))
    return 0, out


def cmd_orth(args):
    a, b = _load_matrix(args.a), _load_matrix(args.b)
    return 0, {
        "orthogonal": is_orthogonal(a, b, args.tol or ORTH_TOL),
        "norm_sum": trace_norm(a + b),
        "norm_difference": trace_norm(a - b),
    }


def cmd_faces(args):
    face = face_of_element(_load_matrix(args.matrix))
    return 0, {"w": matrix_to_json(face.w), "rank": face.rank, "maximal": face.maximal}


def cmd_classify(args):
    f, table = load_oracle(_load_json(args.oracle))
    tol = args.tol or RESIDUAL_TOL
    points = table.inputs if table is not None else None
    try:
        report = recover_isometry(f, n_verify=args.samples, seed=args.seed, tol=tol,
                                  verify_points=points)
    except OracleInconsistentError as exc:
        doc = {"error": "oracle-inconsistent", "stage": exc.stage, "message": str(exc)}
        if exc.report is not None:
            doc["report"] = exc.report.to_dict()
        return 1, doc
    return 0, report.to_dict()


def cmd_verify(args):
    f, _ = load_oracle(_load_json(args.oracle))
    report = verify_sphere_isometry(f, n_samples=args.samples, seed=args.seed,
                                    tol=args.tol or 1e-8)
    return (0 if report.passed else 1), report.to_dict()


def _fuzz_trial(tag, n, seed, eps):
    oracle_seed, noise_seed, verify_seed = spawn_seeds(seed, 3)
    f = perturb_oracle(generate_isometry(GenSpec(tag, n, oracle_seed)), eps, noise_seed)
    try:
        report = recover_isometry(f, seed=verify_seed)
        tag_out, residual = report.tag.value, report.max_residual
    except OracleInconsistentError as exc:
        tag_out = None
        residual = exc.report.max_residual if exc.report is not None else None
    return {
        "tag_in": tag.value,
        "tag_out": tag_out,
        "max_residual": residual,
        "pass": tag_out == tag.value and residual is not None and residual <= RESIDUAL_TOL,
    }


def cmd_fuzz(args):
    if args.trials < 1:
        raise InputError("--trials must be positive")
    try:
        tags = [Variant(t) for t in args.tags.split(",")]
    except ValueError:
        raise InputError(f"--tags must be drawn from {[v.value for v in Variant]}") from None
    seeds = spawn_seeds(args.seed, args.trials)
    jobs = [(tags[k % len(tags)], args.n, seeds[k], args.eps) for k in range(args.trials)]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        lines = list(pool.map(lambda job: _fuzz_trial(*job), jobs))
    code = 0 if all(line["pass"] for line in lines) else 1
    return code, lines


def cmd_inequalities(args):
    n = args.n
    if args.trials < 1 or n < 1:
        raise InputError("--trials and --n must be positive")
    tol = args.tol or INEQUALITY_TOL
    lower = upper = slack = np.inf
    false_pos = false_neg = 0
    for s in spawn_seeds(args.seed, args.trials):
        rng = np.random.default_rng(s)
        a = random_sphere_point(n, int(rng.integers(1, n + 1)), rng) * rng.uniform(0.1, 3.0)
        b = random_sphere_point(n, int(rng.integers(1, n + 1)), rng) * rng.uniform(0.1, 3.0)
        lo, up = clarkson_mccarthy_gap(a, b)
        lower, upper = min(lower, lo), min(upper, up)

        frame = haar_unitary(n, rng)[:, :int(rng.integers(0, n + 1))]
        p = frame @ frame.conj().T
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        slack = min(slack, arazy_slack(x, p))

        # half of the pairs orthogonal by construction
        left, right = haar_unitary(n, rng), haar_unitary(n, rng)
        k = int(rng.integers(1, n)) if n > 1 else 1
        x1 = (left[:, :k] * rng.dirichlet(np.ones(k))) @ right[:, :k].conj().T
        if rng.random() < 0.5 and k < n:
            rest = rng.dirichlet(np.ones(n - k))
            x2 = (left[:, k:] * rest) @ right[:, k:].conj().T
        else:
            x2 = random_sphere_point(n, int(rng.integers(1, n + 1)), rng)
        norm_test = (abs(trace_norm(x1 + x2) - 2) <= ORTH_TOL
                     and abs(trace_norm(x1 - x2) - 2) <= ORTH_TOL)
        orth = is_orthogonal(x1, x2, ORTH_TOL)
        false_pos += orth and not norm_test
        false_neg += norm_test and not orth
    doc = {
        "trials": args.trials,
        "n": n,
        "clarkson_mccarthy": {"min_lower_gap": lower, "min_upper_gap": upper,
                              "pass": bool(lower >= -tol and upper >= -tol)},
        "arazy": {"min_slack": slack, "pass": bool(slack >= -tol)},
        "orthogonality_equivalence": {"false_positives": int(false_pos),
                                      "false_negatives": int(false_neg),
                                      "pass": false_pos == 0 and false_neg == 0},
    }
    doc["pass"] = all(doc[k]["pass"] for k in
                      ("clarkson_mccarthy", "arazy", "orthogonality_equivalence"))
    return (0 if doc["pass"] else 1), doc


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--tol", type=float, default=None)
    shared.add_argument("--out", default=None, help="write JSON here instead of stdout")

    parser = argparse.ArgumentParser(prog="tingley", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s 0.1.0 ({_backend.BACKEND} kernel)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[shared], help="trace norm of a matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("distance", parents=[shared], help="trace-norm distance of two matrices")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("orth", parents=[shared], help="orthogonality test")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_orth)

    p = sub.add_parser("faces", parents=[shared], help="smallest face containing a matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_faces)

    for name, func, samples, text in (
        ("classify", cmd_classify, 200, "recover the canonical form of an oracle"),
        ("verify", cmd_verify, 50, "check sphere-isometry properties of an oracle"),
    ):
        p = sub.add_parser(name, parents=[shared], help=text)
        p.add_argument("--oracle", required=True)
        p.add_argument("--samples", type=int, default=samples)
        p.set_defaults(func=func)

    p = sub.add_parser("fuzz", parents=[shared], help="generate, perturb and recover isometries")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--tags", default=",".join(v.value for v in Variant))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("inequalities", parents=[shared],
                       help="Clarkson-McCarthy, Arazy and orthogonality checks")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_inequalities)
    return parser


def _emit(doc, out, lines=False):
    text = "\n".join(json.dumps(d) for d in doc) if lines else json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code, doc = args.func(args)
    except (InputError, MissingProbeError, ValueError) as exc:
        # precondition, dimension and format errors all stem from the input
        _emit({"error": "input", "message": str(exc)}, None)
        return 2
    except TingleyError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, None)
        return 1
    _emit(doc, args.out, lines=args.command == "fuzz")
    return code


if __name__ == "__main__":
    sys.exit(main())
