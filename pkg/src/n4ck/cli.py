"""Command-line front end.

Exit codes: 0 success, valid or OK; 1 refuted, countermodel found or check
failed; 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import kripke, proofs, search, semantics, translate
from .decide import Refuted, decide_n4
from .syntax import (FormulaSyntaxError, Lang, LanguageError, depth, expand, language_violation, parse,
                     size, to_text)

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _formula(text: str):
    try:
        return parse(text)
    except FormulaSyntaxError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc


def _formula_list(text: str | None):
    if not text:
        return []
    return [_formula(x) for x in text.split(";") if x.strip()]


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_model(path: str):
    try:
        return kripke.loads(_read(path))
    except kripke.InvalidInput as exc:
        raise UsageError(str(exc)) from exc


def _write_model(m, out: str | None) -> str:
    text = kripke.dumps(m)
    if out:
        Path(out).write_text(text)
    return text


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text.rstrip("\n"))


def _bundled_script(path: str) -> str | None:
    """Resolve ``[scripts/][System/]Name.prf`` against the bundled corpus."""
    parts = Path(path).with_suffix("").parts
    if parts and parts[0] == "scripts":
        parts = parts[1:]
    root = resources.files("n4ck").joinpath("scripts")
    if len(parts) == 2:
        candidates = [root.joinpath(parts[0], parts[1] + ".prf")]
    elif len(parts) == 1:
        candidates = [root.joinpath(system, parts[0] + ".prf") for system in ("N4CK", "FSKd", "CK")]
    else:
        return None
    for c in candidates:
        if c.is_file():
            return c.read_text()
    return None


def _read_derivation(path: str) -> proofs.Derivation:
    if Path(path).is_file():
        text = _read(path)
    else:
        text = _bundled_script(path)
        if text is None:
            raise UsageError(f"no such proof script: {path}")
    try:
        return proofs.parse_derivation(text, Path(path).stem)
    except (ValueError, FormulaSyntaxError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------- commands

def cmd_parse(args) -> int:
    f = _formula(args.formula)
    problem = None
    if args.lang:
        try:
            problem = language_violation(f, Lang.from_name(args.lang))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    text = to_text(f, unicode=args.unicode, abbreviate=True)
    payload = {"formula": text, "expanded": to_text(expand(f)), "size": size(f), "depth": depth(f)}
    if args.lang:
        payload["language"] = args.lang
        payload["wellFormed"] = problem is None
        if problem:
            payload["problem"] = problem
    _emit(args, payload, text if problem is None else f"{text}\nnot in {args.lang}: {problem}")
    return OK if problem is None else FAILED


_INTUITIONISTIC_KINDS = ("cint", "mint")


def _evaluate(m, w: int, f, sign: semantics.Sign) -> bool:
    if m.kind in _INTUITIONISTIC_KINDS:
        if sign is not semantics.INT:
            raise UsageError("intuitionistic models take --sign int")
        return semantics.eval_intck(m, w, f) if m.kind == "cint" else semantics.eval_modal(m, w, f, sign)
    if sign is semantics.INT:
        raise UsageError("Nelsonian models take --sign plus or --sign minus")
    if m.kind == "nel":
        return semantics.eval_n4(m, w, f, sign)
    if m.kind == "cnel":
        return semantics.eval_n4ck(m, w, f, sign)
    return semantics.eval_modal(m, w, f, sign)


def cmd_eval(args) -> int:
    m = _load_model(args.model)
    kripke.require_valid(m)
    if not 0 <= args.world < m.size:
        raise UsageError(f"world {args.world} is not in the model")
    f = _formula(args.formula)
    sign = semantics.Sign(args.sign) if args.sign else (
        semantics.INT if m.kind in _INTUITIONISTIC_KINDS else semantics.PLUS)
    value = _evaluate(m, args.world, expand(f) if m.kind != "cint" else f, sign)
    _emit(args, {"value": value, "world": args.world, "sign": sign.value}, str(value).lower())
    return OK


def cmd_truthset(args) -> int:
    m = _load_model(args.model)
    kripke.require_valid(m)
    f = _formula(args.formula)
    ts = semantics.truth_set(m, expand(f) if m.kind != "cint" else f)
    if m.kind in _INTUITIONISTIC_KINDS:
        payload = {"worlds": sorted(ts.plus)}
        text = str(sorted(ts.plus))
    else:
        payload = {"plus": sorted(ts.plus), "minus": sorted(ts.minus)}
        text = f"plus: {sorted(ts.plus)}\nminus: {sorted(ts.minus)}"
    _emit(args, payload, text)
    return OK


def cmd_check_model(args) -> int:
    m = _load_model(args.model)
    problems = kripke.validate(m)
    _emit(args, {"ok": not problems, "violations": [str(v) for v in problems]},
          "OK" if not problems else "\n".join(str(v) for v in problems))
    return OK if not problems else FAILED


def _check_payload(key: str, d: proofs.Derivation, library: proofs.Library) -> tuple[bool, str]:
    try:
        proofs.check_derivation(d, library)
    except proofs.StepError as exc:
        return False, str(exc)
    except LanguageError as exc:
        return False, str(exc)
    return True, "OK"


def cmd_check_proof(args) -> int:
    d = _read_derivation(args.file)
    library = proofs.corpus_library()
    ok, message = _check_payload(args.file, d, library)
    _emit(args, {"ok": ok, "message": message, "system": d.system, "steps": len(d.steps)},
          message if ok else f"FAILED {message}")
    return OK if ok else FAILED


def cmd_decide_n4(args) -> int:
    f = _formula(args.formula)
    premises = [_formula(x) for x in args.premise or []]
    try:
        verdict = decide_n4(premises, f)
    except semantics.IllFormed as exc:
        raise UsageError(str(exc)) from exc
    if isinstance(verdict, Refuted):
        model = kripke.model_to_dict(verdict.model)
        _emit(args, {"valid": False, "world": verdict.world, "model": model},
              f"refuted at world {verdict.world}\n{kripke.dumps(verdict.model)}")
        return FAILED
    _emit(args, {"valid": True}, "valid")
    return OK


def cmd_countermodel(args) -> int:
    gamma, delta = _formula_list(args.gamma), _formula_list(args.delta)
    budget = search.SearchBudget(max_worlds=args.max_worlds, seed=args.seed,
                                 trials=None if args.exhaustive or args.trials is None else args.trials)
    try:
        found = search.find_countermodel(args.logic, gamma, delta, budget)
    except (ValueError, LanguageError) as exc:
        raise UsageError(str(exc)) from exc
    if isinstance(found, search.Certificate):
        text = _write_model(found.model, args.out)
        _emit(args, {"found": True, "world": found.world, "model": kripke.model_to_dict(found.model)},
              f"countermodel at world {found.world}\n{text}")
        return FAILED
    _emit(args, {"found": False, "budget": str(found)}, str(found))
    return OK


def cmd_translate(args) -> int:
    try:
        mapping = translate.MappingId.parse(args.map)
        out = translate.apply(mapping, _formula(args.formula))
    except (ValueError, FormulaSyntaxError) as exc:
        raise UsageError(str(exc)) from exc
    text = to_text(out, unicode=args.unicode, abbreviate=True)
    _emit(args, {"mapping": str(mapping), "formula": text}, text)
    return OK


def cmd_translate_proof(args) -> int:
    d = _read_derivation(args.file)
    direction = translate.Direction(args.direction)
    anchor = _formula(args.anchor) if args.anchor else None
    if direction is translate.Direction.FSKD_TO_N4CK and anchor is None:
        raise UsageError("--anchor is required for fskd-to-n4ck")
    try:
        _, library = translate.translated_corpus(direction, anchor)
        out = translate.translate_proof(d, direction, anchor)
    except translate.SourceUnchecked as exc:
        _emit(args, {"ok": False, "message": f"source does not check: {exc}"},
              f"FAILED source does not check: {exc}")
        return FAILED
    except translate.UnmappableStep as exc:
        _emit(args, {"ok": False, "message": str(exc)}, f"FAILED {exc}")
        return FAILED
    ok, message = _check_payload(args.file, out, library)
    text = proofs.format_derivation(out)
    _emit(args, {"ok": ok, "message": message, "derivation": text},
          text + ("" if ok else f"FAILED {message}\n"))
    return OK if ok else FAILED


def cmd_transform_model(args) -> int:
    m = _load_model(args.model)
    try:
        if args.to_int:
            if m.kind == "cnel":
                out = kripke.to_cond_int(m, args.scheme or "pm")
            elif m.kind == "nel":
                out = kripke.nel_to_int(m)
            elif m.kind == "mnel":
                out = kripke.relabel_modal(m, "nelsonToInt")
            else:
                raise UsageError(f"{m.kind} models are already intuitionistic")
        else:
            if m.kind == "cint":
                # any table, even an empty one, marks a conditional model
                if m.tables or args.scheme:
                    out = kripke.to_cond_nelson(m, args.scheme or "pm")
                else:
                    out = kripke.int_to_nel(m)
            elif m.kind == "mint":
                out = kripke.relabel_modal(m, "intToNelson")
            else:
                raise UsageError(f"{m.kind} models are already Nelsonian")
    except kripke.InvalidInput as exc:
        raise UsageError(str(exc)) from exc
    text = _write_model(out, args.out)
    _emit(args, kripke.model_to_dict(out), text)
    return OK


def cmd_scripts_run_all(args) -> int:
    results = []
    library = proofs.Library()
    for key, d in proofs.script_corpus():
        ok, message = _check_payload(key, d, library)
        results.append((key, ok, message))
        if ok:
            library.add(key, d)
    for direction in translate.Direction:
        anchor = parse(args.anchor) if direction is translate.Direction.FSKD_TO_N4CK else None
        try:
            translated, _ = translate.translated_corpus(direction, anchor)
            results.extend((key, True, "OK") for key, _ in translated)
        except (proofs.StepError, translate.UnmappableStep, translate.SourceUnchecked) as exc:
            results.append((f"{direction.value}", False, str(exc)))
    failed = [r for r in results if not r[1]]
    _emit(args, {"ok": not failed, "results": [{"script": k, "ok": ok, "message": msg}
                                               for k, ok, msg in results]},
          "\n".join(f"{'OK  ' if ok else 'FAIL'} {k}" + ("" if ok else f": {msg}")
                    for k, ok, msg in results))
    return OK if not failed else FAILED


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="n4ck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(run=fn)
        return sp

    sp = add("parse", cmd_parse, "parse and pretty-print a formula")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--lang", help="check membership in a language, e.g. LBoxto")
    sp.add_argument("--unicode", action="store_true")

    sp = add("eval", cmd_eval, "evaluate a formula at a world")
    sp.add_argument("--model", required=True)
    sp.add_argument("--world", type=int, required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--sign", choices=("plus", "minus", "int"))

    sp = add("truthset", cmd_truthset, "print the truth set of a formula")
    sp.add_argument("--model", required=True)
    sp.add_argument("--formula", required=True)

    sp = add("check-model", cmd_check_model, "validate the frame conditions of a model")
    sp.add_argument("--model", required=True)

    sp = add("check-proof", cmd_check_proof, "check a proof script")
    sp.add_argument("file")

    sp = add("decide-n4", cmd_decide_n4, "decide N4 consequence")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--premise", action="append")

    sp = add("countermodel", cmd_countermodel, "bounded countermodel search")
    sp.add_argument("--logic", required=True, type=str.lower, choices=("n4", "n4ck", "fskd"))
    sp.add_argument("--gamma", default="")
    sp.add_argument("--delta", default="")
    sp.add_argument("--max-worlds", type=int, default=3)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--trials", type=int)
    sp.add_argument("--out")

    sp = add("translate", cmd_translate, "translate a formula")
    sp.add_argument("--map", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--unicode", action="store_true")

    sp = add("translate-proof", cmd_translate_proof, "translate a proof script between FSKd and N4CK")
    sp.add_argument("file")
    sp.add_argument("--direction", required=True, choices=[d.value for d in translate.Direction])
    sp.add_argument("--anchor")

    sp = add("transform-model", cmd_transform_model, "companion model constructions")
    target = sp.add_mutually_exclusive_group(required=True)
    target.add_argument("--to-int", action="store_true")
    target.add_argument("--to-n4", action="store_true")
    sp.add_argument("--model", required=True)
    sp.add_argument("--scheme", choices=("pm", "mp", "plus", "minus"))
    sp.add_argument("--out")

    sp = add("scripts-run-all", cmd_scripts_run_all, "check the bundled proof corpus and its translations")
    sp.add_argument("--anchor", default="p0")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (semantics.IllFormed, semantics.FlavorMismatch, kripke.InvalidInput, LanguageError,
            FormulaSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
