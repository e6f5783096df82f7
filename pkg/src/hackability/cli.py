"""Command-line interface.

Exit codes: 0 unhackable / success, 10 hackable (or witness found),
2 input error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import os
from math import factorial
import sys
from pathlib import Path

from . import io as hio
from .diagrams import build_simplification_digraph, build_unhackability_graph, emit_graph
from .environments import (
    CleaningSpec,
    build_cleaning_bandit,
    build_hallway,
    build_line_example,
    build_random_mdp,
    build_two_state,
    subset_bandit_policies,
)
from .errors import CapExceeded, HackabilityError, NotRepresentable, UnknownFormat
from .mdp import DEFAULT_POLICY_CAP, MdpSpec, enumerate_deterministic_policies, validate_mdp
from .ordering import (
    DEFAULT_FUBINI_CAP,
    PolicySet,
    check_hackable,
    check_simplification,
    is_equivalent,
    is_trivial,
    fubini,
    ordering_from_reward,
)
from .representability import (
    check_representable,
    enumerate_representable_orderings,
    find_representable_simplifications,
    simplification_exists,
)
from .witness import PolicyFilter, SearchBudget, equivalence_probe

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_HACKABLE = 10


class _Output:
    """Machine document to --out (or stdout); human text to the other stream."""

    def __init__(self, out):
        self.out = out

    def emit(self, doc_text: str, human: str):
        if self.out:
            Path(self.out).write_text(doc_text)
            print(human)
        else:
            sys.stdout.write(doc_text)
            print(human, file=sys.stderr)


def _load_mdp(path):
    return validate_mdp(hio.mdp_from_doc(hio.load_json(path)))


def _policy_set(mdp, spec: str, cap: int) -> PolicySet:
    if spec == "deterministic":
        return PolicySet.from_policies(mdp, enumerate_deterministic_policies(mdp, cap))
    if spec == "subset-bandit":
        return subset_bandit_policies(mdp)
    return PolicySet.from_policies(mdp, hio.policies_from_doc(hio.load_json(spec)))


def _write(path: Path, doc):
    path.write_text(hio.dump_json(doc))
    return str(path)


def cmd_gen(args) -> int:
    out = Path(args.out)
    if args.env == "cleaning":
        spec = CleaningSpec.build(args.true.split(","), args.proxy.split(","))
        mdp, _, r_true, r_proxy = build_cleaning_bandit(spec, cap=args.room_cap)
        out.mkdir(parents=True, exist_ok=True)
        written = [
            _write(out / "mdp.json", hio.mdp_to_doc(mdp)),
            _write(out / "true.json", hio.reward_to_doc(r_true, mdp.num_actions)),
            _write(out / "proxy.json", hio.reward_to_doc(r_proxy, mdp.num_actions)),
        ]
    elif args.env == "line":
        mdp, bump, step, pi_mix, pi_stay = build_line_example()
        out.mkdir(parents=True, exist_ok=True)
        written = [
            _write(out / "mdp.json", hio.mdp_to_doc(mdp)),
            _write(out / "bump.json", hio.reward_to_doc(bump, mdp.num_actions)),
            _write(out / "step.json", hio.reward_to_doc(step, mdp.num_actions)),
            _write(out / "policies.json", hio.policies_to_doc([pi_mix, pi_stay])),
        ]
    else:
        if args.env == "two-state":
            mdp = build_two_state()
        elif args.env == "random":
            mdp = build_random_mdp(args.states, args.actions, args.seed, density=args.density)
        elif args.env == "hallway":
            mdp = build_hallway(args.length, stay=args.stay)
        else:  # bandit
            names = tuple(f"arm{i}" for i in range(args.arms))
            mdp = validate_mdp(MdpSpec.build([[[1]] * args.arms], [1], "1/2", ("s",), names))
        if out.suffix != ".json":
            out.mkdir(parents=True, exist_ok=True)
            out = out / "mdp.json"
        written = [_write(out, hio.mdp_to_doc(mdp))]
    print("\n".join(f"wrote {w}" for w in written))
    return EXIT_OK


def cmd_analyze(args) -> int:
    mdp = _load_mdp(args.mdp)
    pset = _policy_set(mdp, args.policies, args.cap)
    r1 = hio.reward_from_doc(hio.load_json(args.reward1), mdp)
    r2 = hio.reward_from_doc(hio.load_json(args.reward2), mdp)
    o1, o2 = ordering_from_reward(r1, pset), ordering_from_reward(r2, pset)
    names = pset.names
    w = check_hackable(o1, o2)
    doc = {
        "ordering1": hio.ordering_to_doc(o1, names),
        "ordering2": hio.ordering_to_doc(o2, names),
        "hackable": w is not None,
        "witness": hio.witness_to_doc(w, names) if w else None,
        "simplification_2_of_1": check_simplification(o1, o2),
        "simplification_1_of_2": check_simplification(o2, o1),
        "equivalent": is_equivalent(o1, o2),
        "trivial1": is_trivial(o1),
        "trivial2": is_trivial(o2),
    }
    lines = [
        f"ordering 1: {o1.label(names)}",
        f"ordering 2: {o2.label(names)}",
        "hackable" if w else "unhackable",
    ]
    if w:
        lines.append(
            f"  witness: {names[w.pi_index]} vs {names[w.pi_prime_index]}"
            f" (J1 {hio.fmt(w.j1_pair[0])} < {hio.fmt(w.j1_pair[1])}, J2 {hio.fmt(w.j2_pair[0])} > {hio.fmt(w.j2_pair[1])})"
        )
    lines.append(f"equivalent={doc['equivalent']} trivial1={doc['trivial1']} trivial2={doc['trivial2']}")
    _Output(args.out).emit(hio.dump_json(doc), "\n".join(lines))
    return EXIT_HACKABLE if w else EXIT_OK


def cmd_enumerate(args) -> int:
    mdp = _load_mdp(args.mdp)
    pset = _policy_set(mdp, args.policies, args.cap)
    found = enumerate_representable_orderings(pset, strict_only=args.strict, cap=args.fubini_cap, jobs=args.jobs)
    names = pset.names
    total = factorial(len(pset)) if args.strict else fubini(len(pset))
    doc = {
        "policies": list(names),
        "strict_only": args.strict,
        "orderings": [
            {"ordering": hio.ordering_to_doc(o, names), "verdict": "representable",
             "witness": hio.reward_to_doc(w, mdp.num_actions)["reward"]}
            for o, w in found
        ],
        "summary": {"representable": len(found), "total": total},
    }
    human = "\n".join([o.label(names) for o, _ in found] + [f"{len(found)} of {total} orderings representable"])
    _Output(args.out).emit(hio.dump_json(doc), human)
    return EXIT_OK


def cmd_simplify(args) -> int:
    mdp = _load_mdp(args.mdp)
    pset = _policy_set(mdp, args.policies, args.cap)
    names = pset.names
    if args.reward:
        ordering = ordering_from_reward(hio.reward_from_doc(hio.load_json(args.reward), mdp), pset)
    else:
        ordering = hio.ordering_from_doc(hio.load_json(args.ordering))
        if not check_representable(pset, ordering).representable:
            raise NotRepresentable(f"no reward represents {ordering.label(names)}")
    se = simplification_exists(pset, ordering)
    found = find_representable_simplifications(pset, ordering)
    if se.exists != bool(found):  # pragma: no cover - internal consistency check
        raise AssertionError("rank test disagrees with enumeration of simplifications")
    doc = {
        "ordering": hio.ordering_to_doc(ordering, names),
        "existence": hio.simplification_to_doc(se),
        "simplifications": [
            {"ordering": hio.ordering_to_doc(o, names), "witness": hio.reward_to_doc(w, mdp.num_actions)["reward"]}
            for o, w in found
        ],
    }
    human = "\n".join(
        [f"ordering: {ordering.label(names)}",
         f"non-trivial simplification exists: {se.exists} (dim Z = {se.dim_Z}, dim F = {se.dim_F})"]
        + [f"  {o.label(names)}" for o, _ in found]
    )
    _Output(args.out).emit(hio.dump_json(doc), human)
    return EXIT_OK


def cmd_diagram(args) -> int:
    mdp = _load_mdp(args.mdp)
    pset = _policy_set(mdp, args.policies, args.cap)
    if args.format not in ("dot", "json"):
        raise UnknownFormat(f"unknown graph format {args.format!r}")
    orderings = [o for o, _ in enumerate_representable_orderings(pset, cap=args.fubini_cap, jobs=args.jobs)]
    if args.kind == "simplification":
        graph = build_simplification_digraph(orderings, pset.names)
    else:
        graph = build_unhackability_graph(orderings, pset.names)
    text = emit_graph(graph, args.format, kind=args.kind)
    human = f"{len(graph.nodes)} nodes, {len(graph.undirected_edges)} unhackable pairs, {len(graph.directed_edges)} simplification arrows"
    _Output(args.out).emit(text, human)
    return EXIT_OK


def _parse_filter(text: str, r1):
    if text == "all":
        return PolicyFilter()
    kind, _, value = text.partition(":")
    if kind == "eps":
        return PolicyFilter.eps_suboptimal(value, r1)
    if kind == "delta":
        return PolicyFilter.delta_deterministic(value)
    raise ValueError(f"unknown filter {text!r}")


def cmd_probe(args) -> int:
    mdp = _load_mdp(args.mdp)
    r1 = hio.reward_from_doc(hio.load_json(args.reward1), mdp)
    r2 = hio.reward_from_doc(hio.load_json(args.reward2), mdp)
    pfilter = _parse_filter(args.filter, r1)
    budget = SearchBudget(args.samples, args.refine, args.seed)
    rep = equivalence_probe(mdp, r1, r2, pfilter, budget)
    doc = {
        "seed": rep.seed,
        "budget": {"num_samples": budget.num_samples, "num_refinement_steps": budget.num_refinement_steps},
        "filter": rep.filter,
        "witness": hio.witness_to_doc(rep.witness) if rep.witness else None,
        "orderings_agree_on_sample": rep.orderings_agree_on_sample,
        "samples_checked": rep.samples_checked,
    }
    if rep.witness:
        human = f"witness found: J1 {hio.fmt(rep.witness.j1_pair[0])} < {hio.fmt(rep.witness.j1_pair[1])}, J2 {hio.fmt(rep.witness.j2_pair[0])} > {hio.fmt(rep.witness.j2_pair[1])}"
    else:
        human = (f"no witness in {rep.samples_checked} samples (seed {rep.seed}); "
                 f"orderings agree on sample: {rep.orderings_agree_on_sample}")
    _Output(args.out).emit(hio.dump_json(doc), human)
    return EXIT_HACKABLE if rep.witness else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hackability", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, policies=True):
        sp.add_argument("--out", help="write the JSON document here (default: stdout)")
        sp.add_argument("--cap", type=int, default=DEFAULT_POLICY_CAP, help="deterministic policy enumeration cap")
        sp.add_argument("--fubini-cap", type=int, default=DEFAULT_FUBINI_CAP, help="candidate ordering cap")
        sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        if policies:
            sp.add_argument("--policies", default="deterministic",
                            help="'deterministic', 'subset-bandit' or a policy JSON file")

    g = sub.add_parser("gen", help="write an environment")
    g.add_argument("env", choices=["two-state", "cleaning", "random", "hallway", "bandit", "line"])
    g.add_argument("--out", required=True, help="file (.json) or directory")
    g.add_argument("--true", default="1,1,1")
    g.add_argument("--proxy", default="1,1,0")
    g.add_argument("--room-cap", type=int, default=12)
    g.add_argument("--states", type=int, default=3)
    g.add_argument("--actions", type=int, default=2)
    g.add_argument("--density", type=float, default=0.6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--length", type=int, default=5)
    g.add_argument("--stay", action="store_true")
    g.add_argument("--arms", type=int, default=3)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="hackability/simplification of a reward pair")
    a.add_argument("mdp")
    a.add_argument("reward1")
    a.add_argument("reward2")
    common(a)
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("enumerate", help="all representable orderings")
    e.add_argument("mdp")
    e.add_argument("--strict", action="store_true")
    common(e)
    e.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("simplify", help="rank test plus all representable simplifications")
    s.add_argument("mdp")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--reward")
    grp.add_argument("--ordering")
    common(s)
    s.set_defaults(func=cmd_simplify)

    d = sub.add_parser("diagram", help="unhackability or simplification diagram")
    d.add_argument("mdp")
    d.add_argument("--kind", choices=["unhackability", "simplification"], default="unhackability")
    d.add_argument("--format", default="dot")
    common(d)
    d.set_defaults(func=cmd_diagram)

    pr = sub.add_parser("probe", help="search sampled stochastic policies for a hacking pair")
    pr.add_argument("mdp")
    pr.add_argument("reward1")
    pr.add_argument("reward2")
    pr.add_argument("--filter", default="all", help="all | eps:<rational> | delta:<rational>")
    pr.add_argument("--samples", type=int, default=10_000)
    pr.add_argument("--refine", type=int, default=100)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_probe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (HackabilityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
