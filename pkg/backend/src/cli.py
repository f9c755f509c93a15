"""Command line: python -m src.cli {atiyah,drum,fan} ...

Reports go to stdout (or --out) as JSON; logs go to stderr. Exit status is
0 when the report passes, 1 when a verification fails and 2 on bad input.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

from .config import configure_logging, get_settings
from .drum import segre_drum
from .errors import InvalidInput, RooftopError
from .fan_store import load_fan, save_fan
from .polyhedral import Cone, Fan, dual_cone, star_subdivision
from .quadric import mukai_witness
from .report import ReportEnvelope, error_envelope
from .rooftop import verify_atiyah
from .toric_git import WeightedAction, build_quotient

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def parse_ray(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InvalidInput(f"expected comma-separated integers for a ray, got {text!r}") from None


def emit_fans(m: int, l: int, directory: str) -> List[str]:
    q = build_quotient(WeightedAction.atiyah(m, l))
    written = []
    for name, fan in (("fan_minus", q.fan_minus), ("fan_plus", q.fan_plus), ("blowup", q.blowup_fan)):
        filename = f"{name}.json"
        save_fan(fan, os.path.join(directory, filename))
        written.append(filename)
    return written


def run_atiyah(m: int, l: int, max_size: Optional[int] = None, fans_dir: Optional[str] = None) -> ReportEnvelope:
    report = verify_atiyah(m, l, max_size=max_size)
    results = report.to_dict()
    if fans_dir is not None:
        results["fans"] = emit_fans(m, l, fans_dir)
    return ReportEnvelope("atiyah", {"m": m, "l": l}, results, passed=report.passed)


def run_drum_segre(m: int, l: int) -> ReportEnvelope:
    cert = segre_drum(m, l)
    return ReportEnvelope("drum segre", {"m": m, "l": l}, cert.to_dict(), passed=cert.passed)


def run_drum_quadric(n: int, samples: Optional[int] = None, seed: Optional[int] = None,
                     max_size: Optional[int] = None) -> ReportEnvelope:
    settings = get_settings()
    samples = settings.default_samples if samples is None else samples
    seed = settings.default_seed if seed is None else seed
    cert = mukai_witness(n, samples, seed, max_n=max_size)
    return ReportEnvelope("drum quadric", {"n": n, "samples": samples, "seed": seed}, cert.to_dict(), passed=cert.passed)


def fan_summary(fan: Fan) -> dict:
    problems = fan.check()
    summary = {"fan": fan.to_dict(), "valid": not problems, "problems": problems}
    if not problems:
        cones = fan.maximal_cones()
        summary["smooth"] = all(c.is_smooth() for c in cones)
        summary["simplicial"] = all(c.is_simplicial() for c in cones)
        summary["non_smooth_cones"] = [
            {"cone": sorted(idx), "rays": [list(r) for r in c.rays]}
            for idx, c in zip(fan.maximal, cones)
            if not c.is_smooth()
        ]
    return summary


def run_fan_check(fan: Fan) -> ReportEnvelope:
    summary = fan_summary(fan)
    return ReportEnvelope("fan check", {"lattice_rank": fan.lattice_rank}, summary, passed=summary["valid"])


def run_fan_dual(fan: Fan) -> ReportEnvelope:
    if len(fan.maximal) != 1:
        raise InvalidInput(f"dual needs a fan with one maximal cone, got {len(fan.maximal)}")
    cone = Cone.from_generators(fan.cone(fan.maximal[0]).rays, fan.lattice_rank)
    dual = dual_cone(cone)
    results = {
        "cone": dual.to_dict(),
        "generators": [list(g) for g in dual.generators],
        "pointed": dual.is_pointed,
        "self_dual": set(dual.generators) == set(cone.generators),
    }
    if dual.is_pointed:
        results["fan"] = Fan.single(dual).to_dict()
    return ReportEnvelope("fan dual", {"lattice_rank": fan.lattice_rank}, results, passed=True)


def run_fan_subdivide(fan: Fan, ray) -> ReportEnvelope:
    ray = parse_ray(ray) if isinstance(ray, str) else tuple(ray)
    problems = fan.check()
    if problems:
        raise InvalidInput(f"cannot subdivide an invalid fan: {problems[0]}")
    subdivided = star_subdivision(fan, ray)
    results = {
        "fan": subdivided.to_dict(),
        "maximal_cones": len(subdivided.maximal),
        "smooth": subdivided.is_smooth(),
        "refines": subdivided.refines(fan),
    }
    return ReportEnvelope("fan subdivide", {"ray": list(ray)}, results, passed=True)


class ReportingArgumentParser(argparse.ArgumentParser):
    """Usage errors become InvalidInput so they reach stdout as an error report."""

    def error(self, message):
        raise InvalidInput(f"{self.prog}: {message}", reason="usage_error")


def attach_ray_values(argv: Sequence[str]) -> List[str]:
    """Rewrite `--ray VALUE` as `--ray=VALUE`; argparse takes `-1,0,0` for an option otherwise."""
    out = []
    tokens = iter(argv)
    for token in tokens:
        value = next(tokens, None) if token == "--ray" else None
        out.append(token if value is None else f"{token}={value}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=None, help="Logging level (defaults to ROOFTOP_LOG_LEVEL).")
    common.add_argument("--out", default=None, help="Write the report here instead of stdout.")
    parser = ReportingArgumentParser(prog="rooftop", description="Exact checks of toric rooftop flips and drums.")
    sub = parser.add_subparsers(dest="command", required=True)

    atiyah = sub.add_parser("atiyah", parents=[common], help="Verify the flip of the +1/-1 weight action on C^(m+l+2).")
    atiyah.add_argument("--m", type=int, required=True)
    atiyah.add_argument("--l", type=int, required=True)
    atiyah.add_argument("--max-size", type=int, default=None, help="Cap on m and l.")
    atiyah.add_argument("--emit-fans", default=None, metavar="DIR", help="Write fan_minus, fan_plus and blowup fans.")

    drum = sub.add_parser("drum", help="Drum certificates.")
    kinds = drum.add_subparsers(dest="kind", required=True)
    segre = kinds.add_parser("segre", parents=[common], help="Drum over P^m x P^l.")
    segre.add_argument("--m", type=int, required=True)
    segre.add_argument("--l", type=int, required=True)
    quadric = kinds.add_parser("quadric", parents=[common], help="Quadric drum over P(T_P^n).")
    quadric.add_argument("--n", type=int, required=True)
    quadric.add_argument("--samples", type=int, default=None)
    quadric.add_argument("--seed", type=int, default=None)
    quadric.add_argument("--max-size", type=int, default=None, help="Cap on n.")

    fan = sub.add_parser("fan", help="Fan file operations.")
    ops = fan.add_subparsers(dest="op", required=True)
    for name, text in (("check", "Validate a fan file."), ("dual", "Dual of a single-cone fan."),
                       ("subdivide", "Star subdivision at a ray.")):
        op = ops.add_parser(name, parents=[common], help=text)
        op.add_argument("file")
        if name == "subdivide":
            op.add_argument("--ray", required=True, help="Comma-separated primitive ray, e.g. 1,1,2.")
    return parser


def dispatch(args: argparse.Namespace) -> ReportEnvelope:
    if args.command == "atiyah":
        return run_atiyah(args.m, args.l, args.max_size, args.emit_fans)
    if args.command == "drum":
        if args.kind == "segre":
            return run_drum_segre(args.m, args.l)
        return run_drum_quadric(args.n, args.samples, args.seed, args.max_size)
    fan = load_fan(args.file)
    if args.op == "check":
        return run_fan_check(fan)
    if args.op == "dual":
        return run_fan_dual(fan)
    return run_fan_subdivide(fan, args.ray)


def _parameters(args: argparse.Namespace) -> dict:
    skip = ("log_level", "out", "command", "kind", "op")
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _command_name(args: argparse.Namespace) -> str:
    return " ".join(str(getattr(args, k)) for k in ("command", "kind", "op") if getattr(args, k, None))


COMMAND_WORDS = {"atiyah", "drum", "segre", "quadric", "fan", "check", "dual", "subdivide"}


def _usage_command(argv: Sequence[str]) -> str:
    words = []
    for token in argv:
        if token not in COMMAND_WORDS:
            break
        words.append(token)
    return " ".join(words)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = attach_ray_values(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except InvalidInput as exc:
        configure_logging()
        logger.warning("%s: %s", exc.reason, exc)
        sys.stdout.write(error_envelope(_usage_command(argv), {"argv": argv}, exc).to_json())
        return EXIT_ERROR
    configure_logging(args.log_level)
    try:
        envelope = dispatch(args)
        code = EXIT_PASS if envelope.passed else EXIT_FAIL
    except RooftopError as exc:
        logger.warning("%s: %s", exc.reason, exc)
        envelope = error_envelope(_command_name(args), _parameters(args), exc)
        code = EXIT_ERROR
    text = envelope.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
