"""End-to-end pipeline: window -> family -> hypotheses -> patterns -> tree -> action.

Certification failures abort the run with status ``uncertified``; property
failures are recorded with a witness and the run continues where that is
meaningful.  All checks append to a single Report whose overall status is
the worst component status.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, replace
from typing import Optional

from .errors import (
    CertificationFailure,
    ConflictingRule,
    NonNestedSquare,
    NotTotal,
    OutsideCertifiedDomain,
    ParseError,
    RadiusTooLarge,
    TooLarge,
    TrackTreeError,
    UnknownLetter,
    UnsupportedSubgroup,
)
from .groups import GroupElement, display_word
from .instances import (
    InstanceSpec,
    make_base_spec,
    make_model,
    make_subgroup,
    token_word,
)
from .oracles import (
    MAX_ORACLE_CLASSES,
    MAX_ORACLE_LABELS,
    MAX_ORACLE_VERTICES,
    labeling_matches_canonical,
    oracle_labelings,
    oracle_orientations,
    tree_matches_oracle,
)
from .patterns import (
    TrackSystem,
    assign_labels,
    build_track_system,
    class_order,
    corner_analysis,
    nestedness_check,
    parity_and_coloring,
    square_analysis,
)
from .reports import FAIL, PASS, UNCERTIFIED, Report
from .trees import DualTree, act, build_tree, stabilizer_analysis, tree_metric_and_separation
from .windows import (
    VertexFamily,
    build_base_set,
    build_family,
    build_window,
    explicit_family,
    hypothesis_report,
    radius_stability_report,
)


@dataclass
class RunResult:
    report: Report
    spec: InstanceSpec
    family: Optional[VertexFamily] = None
    system: Optional[TrackSystem] = None
    tree: Optional[DualTree] = None


def run_instance(spec: InstanceSpec, radius: Optional[int] = None,
                 margin: Optional[int] = None) -> RunResult:
    if radius is not None or margin is not None:
        spec = replace(spec, radius=radius if radius is not None else spec.radius,
                       margin=margin if margin is not None else spec.margin)
    spec = spec.validate()
    start = time.perf_counter()
    report = Report(spec.name)
    result = RunResult(report, spec)
    try:
        if spec.mode == "group":
            _run_group(spec, report, result)
        else:
            family = explicit_family(list(spec.universe),
                                     [(n, frozenset(m)) for n, m in spec.explicit_vertices])
            result.family = family
            report.counts["universe"] = len(family.universe)
            report.counts["family_vertices"] = len(family)
            _run_patterns(spec, report, result)
    except ParseError:
        raise
    finally:
        report.timing_ms = (time.perf_counter() - start) * 1000.0
    return result


def _run_group(spec: InstanceSpec, report: Report, result: RunResult):
    try:
        model = make_model(spec)
        sub = make_subgroup(model, spec.subgroup_generators)
        base_spec = make_base_spec(model, spec)
        translations = [model.normalize(token_word(w)) for w in spec.translations]
        expected_k = make_subgroup(model, spec.expected_k_generators)
    except (UnknownLetter, UnsupportedSubgroup, ConflictingRule, ValueError) as exc:
        raise ParseError(str(exc)) from exc

    try:
        window = build_window(model, sub, spec.radius, spec.margin)
    except (RadiusTooLarge, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    report.counts["omega"] = len(window.omega)
    report.counts["core_keys"] = len(window.core)
    report.add("window", PASS)

    base_set = build_base_set(window, base_spec)
    report.counts["base_set_keys"] = len(base_set)
    report.add("base_set", PASS)

    try:
        family = build_family(window, base_set, translations)
    except CertificationFailure as exc:
        report.add("family_certification", UNCERTIFIED, str(exc))
        return
    result.family = family
    report.counts["family_vertices"] = len(family)
    report.add("family_certification", PASS)

    hypo = hypothesis_report(window, base_set, translations, expected_k)
    report.add("left_invariance", PASS)
    bad = [e.word for e in hypo.almost_invariance if not e.certified]
    if bad:
        report.add("almost_invariance", UNCERTIFIED,
                   f"uncertified witness for translate by {bad[0]}")
        return
    report.add("almost_invariance", PASS)
    report.add("properness", PASS if hypo.properness_ok else FAIL,
               None if hypo.properness_ok else hypo.properness_detail)
    bad_k = [e.word for e in hypo.expected_k if not e.certified]
    if bad_k:
        report.add("expected_stabilizer", UNCERTIFIED,
                   f"uncertified expected-stabilizer check for {bad_k[0]}")
        return
    moved = [e.word for e in hypo.expected_k if not e.fixes_base]
    report.add("expected_stabilizer", PASS if not moved else FAIL,
               None if not moved else f"expected stabilizer element {moved[0]} moves the base set")

    nested_ok = _run_patterns(spec, report, result)
    if not nested_ok or result.tree is None:
        return

    tree = result.tree
    action_elements: list[GroupElement] = []
    seen_words = set()
    for g in itertools.chain(translations, expected_k.generators):
        if g.word not in seen_words:
            seen_words.add(g.word)
            action_elements.append(g)
    try:
        bad_action = None
        for g in action_elements:
            rep = act(tree, g)
            if not rep.equivariant or rep.base_image is None:
                bad_action = f"action by {display_word(g.word)}: {rep.witness or 'base image missing'}"
                break
        report.add("action_equivariance", PASS if bad_action is None else FAIL, bad_action)
    except OutsideCertifiedDomain as exc:
        report.add("action_equivariance", UNCERTIFIED, str(exc))
        return

    action_radius = spec.action_radius if spec.action_radius is not None else spec.margin
    ball = model.ball(action_radius)
    stab = stabilizer_analysis(tree, ball, expected_k=expected_k,
                               expected_k_exact=spec.expected_k_exact)
    base_ok = stab.base_contains_expected and stab.base_equals_expected in (None, True)
    report.add("stabilizer_base", PASS if base_ok else FAIL,
               None if base_ok else (stab.base_witness or "base stabilizer mismatch"))
    conj_ok = all(stab.edge_conjugates_ok)
    report.add("stabilizer_edges", PASS if conj_ok else FAIL,
               None if conj_ok else "an edge stabilizer misses a conjugate subgroup element")
    cu = stab.class_union
    if cu.applicable:
        union_ok = cu.closed and cu.inverse_closed and cu.contains_subgroup
        report.add("stabilizer_class_union", PASS if union_ok else FAIL,
                   None if union_ok else (cu.witness or "class union not a subgroup"))
        report.counts["identity_class_size"] = cu.class_size

    stability = radius_stability_report(window, base_spec, translations)
    unstable = [e for e in stability if not e.stable]
    if unstable:
        e = unstable[0]
        report.add("witness_stability", UNCERTIFIED,
                   f"witness for pair {e.pair} changed at radius + 2: "
                   f"{list(e.diff_small)} vs {list(e.diff_large)}")
        return
    report.add("witness_stability", PASS)

    _check_expectations(spec, report, result)


def _run_patterns(spec: InstanceSpec, report: Report, result: RunResult) -> bool:
    """Pattern and tree stages shared by group and explicit modes.

    Returns True when the instance is nested and the tree stages ran.
    """
    family = result.family
    try:
        system = build_track_system(family)
    except TooLarge as exc:
        raise ParseError(str(exc)) from exc
    result.system = system
    report.counts["tracks"] = len(system.labels)
    report.counts["classes"] = len(system.classes)
    table = system.table

    try:
        parity_and_coloring(table)
        report.add("parity", PASS)
    except TrackTreeError as exc:
        report.add("parity", FAIL, str(exc))

    try:
        for u, v, w in itertools.combinations(range(system.n), 3):
            corner_analysis(table, u, v, w)
        report.add("corners", PASS)
    except TrackTreeError as exc:
        report.add("corners", FAIL, str(exc))

    square_witness = None
    for a, b, c, d in itertools.combinations(range(system.n), 4):
        # the three ways of pairing four vertices into opposite sides
        for quad in ((a, b, c, d), (a, c, b, d), (a, b, d, c)):
            try:
                square_analysis(table, *quad)
            except NonNestedSquare as exc:
                square_witness = str(exc)
                break
        if square_witness:
            break
    report.add("squares", PASS if square_witness is None else FAIL, square_witness)

    nested = nestedness_check(system)
    if nested.ok:
        report.add("nestedness", PASS)
    else:
        c1, c2, quadrant = nested.witness
        report.add("nestedness", FAIL,
                   f"cosets {display_word(c1)} and {display_word(c2)} cross; "
                   f"quadrant vertices {quadrant}")
        _check_expectations(spec, report, result, nested_ok=False)
        return False

    try:
        for i in range(system.n):
            for j in range(system.n):
                if i == j or not table.d(i, j):
                    continue
                forward = class_order(system, i, j)
                if i < j and class_order(system, j, i) != list(reversed(forward)):
                    raise NotTotal(system.classes[forward[0]][0],
                                   system.classes[forward[-1]][0],
                                   (table.names[i], table.names[j]))
        report.add("class_orders", PASS)
    except NotTotal as exc:
        report.add("class_orders", FAIL, str(exc))
        return False

    assign_labels(system)
    report.add("labelling", PASS)

    tree = build_tree(system)
    result.tree = tree
    report.counts["tree_vertices"] = tree.vertex_count
    report.counts["tree_edges"] = tree.edge_count
    report.add("tree", PASS)

    if len(system.classes) <= MAX_ORACLE_CLASSES:
        oracle = oracle_orientations(system)
        match = tree_matches_oracle(tree, oracle)
        report.add("tree_oracle", PASS if match else FAIL,
                   None if match else "median-closure tree differs from the orientation oracle")

    geo_witness = None
    for a in range(tree.vertex_count):
        for b in range(a + 1, tree.vertex_count):
            path = tree_metric_and_separation(tree, a, b)
            if path.length != len(tree.vertices[a].flips ^ tree.vertices[b].flips):
                geo_witness = f"path ({a}, {b}) is not geodesic"
                break
        if geo_witness:
            break
    if geo_witness is None:
        for i in range(system.n):
            for j in range(i + 1, system.n):
                ti, tj = tree.family_vertex[i], tree.family_vertex[j]
                if tree_metric_and_separation(tree, ti, tj).length != table.d(i, j):
                    geo_witness = f"family pair ({i}, {j}) has wrong tree distance"
                    break
            if geo_witness:
                break
    report.add("separation_geodesic", PASS if geo_witness is None else FAIL, geo_witness)

    if len(system.labels) <= MAX_ORACLE_LABELS and system.n <= MAX_ORACLE_VERTICES:
        oracle = oracle_labelings(system)
        canonical = assign_labels(system)
        canon_tuple = tuple(canonical[e] for e in oracle.edges)
        ok = (oracle.count == oracle.expected_count
              and canon_tuple in oracle.labelings
              and all(labeling_matches_canonical(system, canonical, lab, oracle.edges)
                      for lab in oracle.labelings))
        report.add("labeling_oracle", PASS if ok else FAIL,
                   None if ok else f"{oracle.count} labelings vs expected {oracle.expected_count}")

    if spec.mode == "explicit":
        _check_expectations(spec, report, result)
    return True


def _check_expectations(spec: InstanceSpec, report: Report, result: RunResult,
                        nested_ok: bool = True):
    exp = spec.expectations
    problems = []
    if exp.nested is not None and exp.nested != nested_ok:
        problems.append(f"nested: expected {exp.nested}, got {nested_ok}")
    if result.tree is not None:
        if exp.tree_vertices is not None and result.tree.vertex_count != exp.tree_vertices:
            problems.append(
                f"tree_vertices: expected {exp.tree_vertices}, got {result.tree.vertex_count}")
        if exp.tree_edges is not None and result.tree.edge_count != exp.tree_edges:
            problems.append(
                f"tree_edges: expected {exp.tree_edges}, got {result.tree.edge_count}")
    if result.system is not None and exp.class_sizes is not None:
        sizes = tuple(sorted(len(c) for c in result.system.classes))
        if sizes != exp.class_sizes:
            problems.append(f"class_sizes: expected {exp.class_sizes}, got {sizes}")
    if any(v is not None for v in (exp.nested, exp.tree_vertices, exp.tree_edges, exp.class_sizes)):
        report.add("expectations", PASS if not problems else FAIL,
                   None if not problems else "; ".join(problems))
