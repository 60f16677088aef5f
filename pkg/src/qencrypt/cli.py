"""Command-line interface: ``qencrypt gen|verify|analyze|demo``.

Exit codes: 0 success or secure, 1 insecure or protocol failure, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import protocols
from .density import StateVector, fidelity_pure
from .encryption import (
    SECURITY_TOL,
    InvalidEncryptionSetError,
    check_security_basis,
    check_security_sampled,
    conjugated_basis,
    qotp,
)
from .optimality import analyze
from .pauli import MAX_QUBITS, BitString
from .setfile import SetFileError, dumps, read_set, report_document, write_set

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _qubits(text):
    n = int(text)
    if not 1 <= n <= MAX_QUBITS:
        raise argparse.ArgumentTypeError(f"n must be in [1, {MAX_QUBITS}], got {n}")
    return n


def _seed(text):
    seed = int(text)
    if seed < 0:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer")
    return seed


def _emit(args, kind: str, body: dict, lines):
    if args.format == "json":
        sys.stdout.write(dumps(report_document(kind, body)))
    else:
        for line in lines:
            print(line)


def _fmt_bool(flag) -> str:
    return "true" if flag else "false"


def cmd_gen(args) -> int:
    if args.kind == "qotp":
        s = qotp(args.n)
    else:
        s = conjugated_basis(args.n, seed=args.seed)
    write_set(s, args.out)
    print(f"wrote {args.kind} set: n={s.n} M={s.M} -> {args.out}")
    return EXIT_OK


def _security_lines(report) -> list:
    lines = [
        f"{report.method}: {'secure' if report.secure else 'INSECURE'}",
        f"  max_residual {report.max_residual:.3e} (tol {report.tol:.1e}, {report.checked} checked)",
    ]
    if report.witness is not None:
        lines.append(f"  witness alpha={report.witness[0]} beta={report.witness[1]}")
    if report.witness_state is not None:
        lines.append(f"  witness state {report.witness_state}")
    return lines


def cmd_verify(args) -> int:
    s = read_set(args.input)
    reports = []
    if args.mode in ("basis", "both"):
        reports.append(check_security_basis(s, tol=args.tol))
    if args.mode in ("sampled", "both"):
        reports.append(check_security_sampled(s, args.samples, seed=args.seed, tol=args.tol))
    verdicts = {r.secure for r in reports}
    agree = len(verdicts) == 1
    secure = all(r.secure for r in reports)
    lines = [f"set {args.input}: n={s.n} M={s.M}"]
    for r in reports:
        lines += _security_lines(r)
    if args.mode == "both":
        lines.append(f"verdicts agree: {_fmt_bool(agree)}")
    lines.append(f"secure: {_fmt_bool(secure)}")
    body = {
        "input": str(args.input),
        "n": s.n,
        "M": s.M,
        "secure": secure,
        "agree": agree,
        "reports": [r.to_dict() for r in reports],
    }
    _emit(args, "security_report", body, lines)
    return EXIT_OK if secure else EXIT_FAIL


def cmd_analyze(args) -> int:
    s = read_set(args.input)
    rep = analyze(s, security_tol=args.tol)
    lines = [f"set {args.input}: n={s.n} M={rep.M_count}"]
    if not rep.applicable:
        lines.append("not applicable: the set is not secure")
        lines += _security_lines(rep.security)
    lines += [
        f"entropy {rep.entropy_bits:.3f} bits (bound {2 * s.n}, ok {_fmt_bool(rep.entropy_ok)})",
        f"gram_ok {_fmt_bool(rep.gram_ok)} (residual {rep.gram_residual:.3e})",
        f"max_prob {rep.max_prob:.6g} (bound {4.0 ** -s.n:.6g}, ok {_fmt_bool(rep.prob_bound_ok)})",
        f"M_count {rep.M_count} (>= {4 ** s.n}: {_fmt_bool(rep.M_bound_ok)})",
    ]
    if rep.singular_values is not None:
        sv = np.asarray(rep.singular_values)
        lines.append(
            f"singular values: {sv.size} in [{sv.min():.6g}, {sv.max():.6g}] "
            f"(ok {_fmt_bool(rep.spectrum_ok)})"
        )
    else:
        lines.append("singular values: skipped (set exceeds SVD row cap)")
    if rep.minimal_case is not None:
        mc = rep.minimal_case
        lines.append(
            f"minimal_case uniform {_fmt_bool(mc.uniform_ok)} orthonormal {_fmt_bool(mc.orthonormal_ok)}"
        )
    body = {"input": str(args.input), **rep.to_dict()}
    _emit(args, "optimality_report", body, lines)
    return EXIT_OK if rep.ok else EXIT_FAIL


def _parse_key(text: str, n: int):
    try:
        alpha, beta = text.split(":")
        alpha, beta = BitString.from_str(alpha), BitString.from_str(beta)
    except ValueError:
        raise UsageError(f"key must look like alpha:beta, e.g. 10:01, got {text!r}") from None
    if alpha.n != n or beta.n != n:
        raise UsageError(f"key halves must have {n} bits each, got {text!r}")
    return alpha, beta


def _demo_superdense(args, lines, body) -> bool:
    n = args.n
    if args.key is None:
        rng = np.random.default_rng(args.seed)
        alpha = BitString(tuple(rng.integers(0, 2, n)))
        beta = BitString(tuple(rng.integers(0, 2, n)))
    else:
        alpha, beta = _parse_key(args.key, n)
    (ra, rb), probs = protocols.superdense_recover_key(n, alpha, beta, seed=args.seed)
    lines.append(f"Bob's key {alpha}:{beta}; Alice shares {n} singlet(s)")
    for i in range(n):
        p = " ".join(f"{x:.3f}" for x in probs[i])
        lines.append(f"  pair {i}: Bob applies X^{alpha.bits[i]} Z^{beta.bits[i]}; Bell probs [{p}]")
    ok = (ra, rb) == (alpha, beta)
    lines.append(f"recovered {ra}:{rb}")
    body.update(key=f"{alpha}:{beta}", recovered=f"{ra}:{rb}", probabilities=probs.tolist())
    return ok


def _demo_teleport(args, lines, body) -> bool:
    message = StateVector.random(1, seed=args.seed)
    result = protocols.teleport_one_qubit(message, seed=args.seed)
    dist = protocols.teleport_fidelity_distance(message, result)
    fidelity = fidelity_pure(message, result.bob_post)
    marginal = protocols.bob_marginal(result.branches)
    mix_err = float(np.linalg.norm(marginal - np.eye(2) / 2))
    p = " ".join(f"{x:.3f}" for x in result.probabilities)
    lines += [
        f"message amplitudes {np.round(message.amps, 6).tolist()}",
        f"Bell outcome probabilities [{p}]",
        f"outcome {result.outcome.label} -> correction {result.outcome.pauli}",
        f"Bob's state before correction, averaged over outcomes: |rho - I/2| = {mix_err:.3e}",
        f"trace distance to message {dist:.3e}",
        f"fidelity {fidelity:.6f}",
    ]
    body.update(
        outcome=result.outcome.index,
        probabilities=result.probabilities.tolist(),
        trace_distance=dist,
        fidelity=fidelity,
        marginal_residual=mix_err,
    )
    return dist <= SECURITY_TOL and mix_err <= 1e-12


def _demo_classical(args, lines, body) -> bool:
    n = args.n
    rng = np.random.default_rng(args.seed)
    weights = rng.dirichlet(np.ones(2**n))
    prior = protocols.DiscreteDistribution(
        (format(i, f"0{n}b"), float(w)) for i, w in enumerate(weights)
    )
    joint = protocols.otp_joint(prior, protocols.uniform_distribution(n))
    info = protocols.mutual_information(joint)
    lines += [
        f"random {n}-bit message prior, H(M) = {prior.entropy():.6f} bits",
        f"uniform {n}-bit key, c = m xor k",
        f"I(M;C) = {info:.6f}",
    ]
    body.update(message_entropy=prior.entropy(), mutual_information=info)
    return info <= 1e-12


def cmd_demo(args) -> int:
    lines = [f"demo {args.which}"]
    body = {"which": args.which, "n": args.n, "seed": args.seed}
    if args.which == "superdense":
        ok = _demo_superdense(args, lines, body)
    elif args.which == "teleport":
        ok = _demo_teleport(args, lines, body)
    else:
        ok = _demo_classical(args, lines, body)
    lines.append("result: ok" if ok else "result: FAILED")
    body["ok"] = ok
    _emit(args, "demo_transcript", body, lines)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qencrypt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("human", "json"), default="human")
        p.add_argument("--tol", type=_positive_float, default=SECURITY_TOL)

    gen = sub.add_parser("gen", help="write an encryption-set file")
    gen.add_argument("kind", choices=("qotp", "conjugated"))
    gen.add_argument("--n", type=_qubits, required=True)
    gen.add_argument("--seed", type=_seed, default=0)
    gen.add_argument("--out", type=Path, required=True)
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="check the security of an encryption-set file")
    ver.add_argument("input", type=Path)
    ver.add_argument("--mode", choices=("basis", "sampled", "both"), default="basis")
    ver.add_argument("--samples", type=int, default=50)
    ver.add_argument("--seed", type=_seed, default=0)
    common(ver)
    ver.set_defaults(func=cmd_verify)

    ana = sub.add_parser("analyze", help="key-size optimality report for a set file")
    ana.add_argument("input", type=Path)
    common(ana)
    ana.set_defaults(func=cmd_analyze)

    demo = sub.add_parser("demo", help="run a protocol and print a transcript")
    demo.add_argument("which", choices=("teleport", "superdense", "classical-otp"))
    demo.add_argument("--n", type=_qubits, default=1)
    demo.add_argument("--key", help="alpha:beta bit strings, superdense only")
    demo.add_argument("--seed", type=_seed, default=0)
    common(demo)
    demo.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SetFileError, InvalidEncryptionSetError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
