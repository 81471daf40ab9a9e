"""JSON-first command line front end.

Subcommands: forms, comass, classify, normalform, verify.
Exit codes: 0 success / all checks pass, 1 suite failures, 2 usage or input
errors.  Output is compact JSON on stdout; --pretty indents it, --no-timing
removes elapsed-time fields so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from caliber import registry
from caliber.calib import Plane, SearchParams, comass_search
from caliber.exterior import ComplexAltForm, form_from_json, form_to_json
from caliber.model import build_hyperkahler_cone, build_twistor_model, default_link_frame
from caliber.planes import classify_plane, normal_form_theta, phase_rigidity_scan
from caliber.suites import SUITES, coverage_table, run_suite


class UsageError(Exception):
    pass


def _emit(data, pretty: bool) -> None:
    if pretty:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(json.dumps(data, sort_keys=True, separators=(",", ":")))


def _model_for(space: str, n: int):
    if space == "cone":
        return build_hyperkahler_cone(n)
    if space == "link":
        return default_link_frame(n)
    if space == "twistor":
        return build_twistor_model(n)
    raise UsageError(f"unknown space {space!r}")


def _load_form(args) -> tuple[object, str | None]:
    name = args.form
    if name.endswith(".json"):
        try:
            with open(name, "r", encoding="utf-8") as fh:
                return form_from_json(json.load(fh)), None
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"could not load form file {name!r}: {exc}") from exc
    try:
        form, space = registry.resolve(name, args.n, args.space)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    return form, space


def _real_form(form):
    if isinstance(form, ComplexAltForm):
        raise UsageError("form is complex valued; use its re_*/im_* registry entry instead")
    return form.to_float()


def _envelope_report(result, n: int) -> dict:
    """Exploratory: dimensions of the quaternionic spans of maximizer planes.

    Reported only, never asserted: it probes whether special-isotropic
    maximizers stay inside quaternionic subspaces of the expected dimension.
    """
    hk = build_hyperkahler_cone(n)
    counts: dict[int, int] = {}
    for plane in result.maximizer_planes(1e-6):
        span_rows = [plane.frame]
        for Ip in hk.complex_structures:
            span_rows.append(plane.frame @ Ip.T)
        stacked = np.vstack(span_rows)
        rank = int(np.sum(np.linalg.svd(stacked, compute_uv=False) > 1e-8))
        counts[rank] = counts.get(rank, 0) + 1
    return {"quaternionic_span_dim_counts": {str(k): v for k, v in sorted(counts.items())}}


def _cmd_forms(args) -> int:
    if args.action == "list":
        _emit({"space": args.space, "n": args.n, "forms": registry.list_entries(args.space, args.n)}, args.pretty)
        return 0
    form, space = registry.resolve(args.name, args.n, args.space)
    payload = form_to_json(form)
    payload["name"] = args.name
    payload["space"] = space
    _emit(payload, args.pretty)
    return 0


def _cmd_comass(args) -> int:
    form, space = _load_form(args)
    f = _real_form(form)
    k = args.k if args.k is not None else f.degree
    if k != f.degree:
        raise UsageError(f"requested k={k} but the form has degree {f.degree}")
    params = SearchParams(restarts=args.restarts, seed=args.seed, tol=args.tol)
    result = comass_search(f, k=k, params=params)
    payload = result.to_json()
    payload["form"] = args.form
    if args.explore_envelope:
        if space != "cone":
            raise UsageError("--explore-envelope applies to cone-space forms")
        payload["envelope_report"] = _envelope_report(result, args.n)
    _emit(payload, args.pretty)
    return 0


def _read_plane(path: str) -> Plane:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return Plane.from_json(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"could not load plane file {path!r}: {exc}") from exc


def _cmd_classify(args) -> int:
    model = _model_for(args.space, args.n)
    plane = _read_plane(args.plane)
    report = classify_plane(plane, model, tol=args.tol)
    _emit(report.to_json(), args.pretty)
    return 0


def _cmd_normalform(args) -> int:
    model = build_twistor_model(args.n)
    plane = _read_plane(args.plane)
    try:
        result = normal_form_theta(plane, model, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(result.to_json(), args.pretty)
    return 0


def _cmd_verify(args) -> int:
    if args.suite == "phase-scan":
        model = build_twistor_model(args.n)
        params = SearchParams(restarts=args.restarts or 400, seed=args.seed)
        report = phase_rigidity_scan(model, params=params)
        _emit(report.to_json(), args.pretty)
        return 0
    try:
        report = run_suite(args.suite, args.n, seed=args.seed, samples=args.samples, restarts=args.restarts)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = report.to_json(include_timing=not args.no_timing)
    payload["coverage"] = coverage_table()
    _emit(payload, args.pretty)
    return 0 if report.overall == "pass" else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="caliber", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, space_default=None, space_required=False):
        p.add_argument("--n", type=int, default=1, help="quaternionic dimension parameter (1..3)")
        p.add_argument("--pretty", action="store_true")
        if space_required:
            p.add_argument("--space", choices=registry.SPACES, required=True)
        else:
            p.add_argument("--space", choices=registry.SPACES, default=space_default)

    p_forms = sub.add_parser("forms", help="list the form catalog or dump one form as JSON")
    forms_sub = p_forms.add_subparsers(dest="action", required=True)
    p_list = forms_sub.add_parser("list")
    common(p_list, space_default="cone")
    p_list.set_defaults(func=_cmd_forms)
    p_dump = forms_sub.add_parser("dump")
    p_dump.add_argument("--name", required=True)
    common(p_dump)
    p_dump.set_defaults(func=_cmd_forms)

    p_comass = sub.add_parser("comass", help="multi-start comass search for a named form or JSON file")
    p_comass.add_argument("--form", required=True, help="registry name or path to a form .json file")
    p_comass.add_argument("--k", type=int, default=None)
    p_comass.add_argument("--restarts", type=int, default=200)
    p_comass.add_argument("--seed", type=int, default=0)
    p_comass.add_argument("--tol", type=float, default=1e-10, help="Riemannian gradient tolerance")
    p_comass.add_argument("--explore-envelope", action="store_true")
    common(p_comass)
    p_comass.set_defaults(func=_cmd_comass)

    p_classify = sub.add_parser("classify", help="classify a plane from a JSON file against a model space")
    p_classify.add_argument("--plane", required=True)
    p_classify.add_argument("--tol", type=float, default=1e-8)
    common(p_classify, space_required=True)
    p_classify.set_defaults(func=_cmd_classify)

    p_nf = sub.add_parser("normalform", help="normal-form angle of a calibrated 3-plane (twistor model)")
    p_nf.add_argument("--plane", required=True)
    p_nf.add_argument("--tol", type=float, default=1e-8)
    common(p_nf)
    p_nf.set_defaults(func=_cmd_normalform)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", choices=SUITES + ("phase-scan",), required=True)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=None)
    p_verify.add_argument("--restarts", type=int, default=None)
    p_verify.add_argument("--no-timing", action="store_true")
    common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
