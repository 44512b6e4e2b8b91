"""Acceptance gate: one test per shipping criterion.

Each test prints a single PASS line naming the criterion and its
measured scale; run with `pytest tests/test_acceptance.py -s` (or read
pytest's own per-test summary). Failures mean the criterion is not met.
"""

import random
import statistics
import subprocess
import sys
import time
import xml.etree.ElementTree as ET
from itertools import product

import pytest

from brics import (
    BlockKind,
    MultiOutputError,
    block_dependencies,
    conditional_activity,
    editor_rects,
    enclosing_method,
    extract_block,
    load_builtin,
    open_session,
    overview_model,
    parse_blocks,
    render_ansi,
    render_svg,
    shade_for_depth,
    text_digest,
)
from brics import DEFAULT_PALETTE
from brics.cli import run_cli
from brics.session import Edit, _is_boundary
from brics.source import SourceText

from conftest import corpus_cases
from oracles import (
    Branch,
    Chain,
    chain_source,
    deps_oracle,
    expected_activity,
    gen_source,
    span_multiset,
    spans_oracle,
)
from refactor_corpus import CASES
from test_blockparse import tree_spans
from test_render import ANSI_RE


# ---------------------------------------------------------------------------
# 1. parser oracle equivalence

def test_acceptance_parser_matches_oracle_on_500_sources():
    grammar = load_builtin("c")
    started = time.monotonic()
    checked = 0
    for seed in range(500):
        rng = random.Random(seed)
        max_lines = (60, 150, 300, 500)[seed % 4]
        text = gen_source(rng, max_lines=max_lines, max_depth=8)
        tree, _ = parse_blocks(SourceText.from_text(text), grammar)
        assert tree_spans(tree) == span_multiset(spans_oracle(text, grammar)), \
            f"span mismatch at seed {seed}"
        checked += 1
    elapsed = time.monotonic() - started
    assert checked == 500
    assert elapsed < 30.0, f"oracle sweep took {elapsed:.1f}s"
    print(f"PASS: parser/oracle span equivalence on {checked} generated "
          f"sources, 0 mismatches, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 2. structural invariants

def test_acceptance_structural_invariants_hold_on_generated_cases():
    grammar = load_builtin("c")
    cases = 0
    for seed in range(150):
        text = gen_source(random.Random(10_000 + seed), max_lines=80)
        source = SourceText.from_text(text)
        tree, _ = parse_blocks(source, grammar)
        rects = {r.block_id: r for r in editor_rects(tree, source)}
        for node in tree:
            # depth increments and containment along the parent chain
            for child in node.children:
                assert child.depth == node.depth + 1
                assert node.open_pos <= child.open_pos
                assert child.close_pos <= node.close_pos
                parent_rect, child_rect = rects[node.id], rects[child.id]
                assert parent_rect.top_line <= child_rect.top_line
                assert child_rect.bottom_line <= parent_rect.bottom_line
                assert parent_rect.left_col <= child_rect.left_col
                assert child_rect.right_col <= parent_rect.right_col
            # siblings do not interleave
            for prev, nxt in zip(node.children, node.children[1:]):
                assert prev.close_pos < nxt.open_pos
        for prev, nxt in zip(tree.roots, tree.roots[1:]):
            assert prev.close_pos < nxt.open_pos
        cases += 1
    for depth in range(10):
        assert shade_for_depth(DEFAULT_PALETTE, depth)[0] == \
            shade_for_depth(DEFAULT_PALETTE, depth + 2)[0]
        assert shade_for_depth(DEFAULT_PALETTE, depth)[0] != \
            shade_for_depth(DEFAULT_PALETTE, depth + 1)[0]
    print(f"PASS: containment/depth/sibling/alternation invariants on "
          f"{cases} generated cases")


# ---------------------------------------------------------------------------
# 3. overview ratio and granularity monotonicity

def test_acceptance_overview_aspect_exact_and_granularity_monotone():
    blocks_checked = 0
    for path, gname in corpus_cases():
        grammar = load_builtin(gname)
        source = SourceText.from_text(path.read_text())
        tree, _ = parse_blocks(source, grammar)
        zooms = [None]
        if source.line_count >= 4:
            zooms.append((2, source.line_count - 1))
        previous_ids = None
        for g in range(tree.max_depth + 2):
            for zoom in zooms:
                model = overview_model(tree, source, 163, 89, g, zoom)
                for r in model.rects:
                    cols = r.right_col - r.left_col
                    rows = r.bottom_line - r.top_line + 1
                    # one uniform scale: pixel geometry is exactly the
                    # character extents times model.scale, so pixel aspect
                    # equals character aspect
                    assert r.w == cols * model.scale
                    assert r.h == rows * model.scale
                    assert r.x == r.left_col * model.scale
                    assert r.y == (r.top_line - model.from_line) * model.scale
                    blocks_checked += 1
            ids = {r.block_id for r in overview_model(tree, source, 163, 89, g).rects}
            if previous_ids is not None:
                assert previous_ids <= ids, f"{path.name} g={g}"
            previous_ids = ids
    assert blocks_checked > 0
    print(f"PASS: overview pixel aspect exact and granularity monotone "
          f"({blocks_checked} block measurements over the corpus)")


# ---------------------------------------------------------------------------
# 4. synchronization: equality under random edits, and latency

_EDIT_MENU = ["{", "}", "x = 1;\n", "// }\n", '"s{"', "#ifdef A\n", "#endif\n",
              "", "é⟨", "/* c */"]


def _random_edit(rng, data):
    while True:
        start = rng.randint(0, len(data))
        end = rng.randint(start, min(len(data), start + 16))
        if _is_boundary(data, start) and _is_boundary(data, end):
            break
    if len(data) > 30_000:
        end = min(len(data), start + 200)
        while not _is_boundary(data, end):
            end += 1
        return start, end, ""
    return start, end, rng.choice(_EDIT_MENU)


def test_acceptance_session_equals_full_reparse_over_20x1000_edits():
    grammar = load_builtin("c")
    divergences = 0
    total = 0
    for seed in range(20):
        rng = random.Random(seed)
        session = open_session(gen_source(rng, max_lines=30), "c")
        for _ in range(1000):
            doc = session.document
            start, end, replacement = _random_edit(rng, doc.text.encode("utf-8"))
            snap = session.apply_edit(Edit(start, end, replacement, doc.version))
            expected_tree, expected_diags = parse_blocks(
                SourceText.from_text(session.document.text), grammar)
            if snap.tree != expected_tree or list(snap.diagnostics) != expected_diags:
                divergences += 1
            total += 1
    assert divergences == 0
    print(f"PASS: session tree equals full reparse after {total} edits "
          f"(20 seeds x 1000), 0 divergences")


def thousand_line_source():
    lines = []
    for i in range(90):
        lines.append(f"void fn{i}(int a) {{")
        for j in range(3):
            lines.append(f"    if (a > {j}) {{")
            lines.append(f"        a = a + {j};")
            lines.append("    }")
        lines.append("}")
    while len(lines) < 1000:
        lines.append(f"x = {len(lines)};")
    return "\n".join(lines) + "\n"


def test_acceptance_apply_edit_median_latency_under_50ms():
    text = thousand_line_source()
    assert SourceText.from_text(text).line_count == 1001  # 1000 + final empty
    session = open_session(text, "c")
    rng = random.Random(1)
    timings = []
    for _ in range(200):
        doc = session.document
        start, end, replacement = _random_edit(rng, doc.text.encode("utf-8"))
        t0 = time.perf_counter()
        session.apply_edit(Edit(start, end, replacement, doc.version))
        timings.append(time.perf_counter() - t0)
    median = statistics.median(timings) * 1000
    assert median < 50.0, f"median apply_edit {median:.2f} ms"
    print(f"PASS: median apply_edit latency {median:.2f} ms on a "
          f"1000-line file (200 edits, budget 50 ms)")


# ---------------------------------------------------------------------------
# 5. refactoring corpus vs oracle

def test_acceptance_refactor_corpus_matches_oracle():
    grammar = load_builtin("c")
    assert len(CASES) >= 20
    extracted = multi = 0
    for case in CASES:
        source = SourceText.from_text(case["text"])
        tree, diags = parse_blocks(source, grammar)
        assert diags == []
        block = [n for n in tree if n.kind.value == case["target"][0]][case["target"][1]]
        if case["extract"] == "no_method":
            continue
        method = enclosing_method(tree, block)
        deps = block_dependencies(source, tree, grammar, block.id)
        oracle_in, oracle_out = deps_oracle(
            case["text"], grammar,
            (method.first_line, method.last_line),
            (block.first_line, block.last_line))
        assert (list(deps.inputs), list(deps.outputs)) == (oracle_in, oracle_out), \
            case["name"]
        if case["extract"] == "multi_output":
            with pytest.raises(MultiOutputError):
                extract_block(source, tree, grammar, block.id, "extracted")
            multi += 1
            continue
        result = extract_block(source, tree, grammar, block.id, "extracted")
        tree2, diags2 = parse_blocks(SourceText.from_text(result.new_source), grammar)
        assert diags2 == [], case["name"]
        before = sum(1 for n in tree if n.kind == BlockKind.CALLABLE)
        after = sum(1 for n in tree2 if n.kind == BlockKind.CALLABLE)
        assert after == before + 1, case["name"]
        extracted += 1
    print(f"PASS: dependency sets match oracle on {len(CASES)} snippets; "
          f"{extracted} extractions reparse clean with one added callable; "
          f"{multi} multi-output rejections")


# ---------------------------------------------------------------------------
# 6. conditional activity, exhaustive

def _chain_structures():
    """Directive chains of length 1..4 in several shapes, plus nesting."""
    symbols = ["A", "B", "C", "D"]
    exprs = ["defined(B)", "!defined(C)", "defined(A) && defined(C)",
             "defined(C) || !defined(D)", "(defined(A) || defined(B)) && !defined(D)"]
    structures = []
    for length in (1, 2, 3, 4):
        for first in ("ifdef", "ifndef", "if"):
            for with_else in (False, True):
                if with_else and length == 1:
                    continue
                branches = []
                if first == "if":
                    branches.append(Branch("if", exprs[length % len(exprs)], ["a;"]))
                else:
                    branches.append(Branch(first, symbols[length % 4], ["a;"]))
                middle = length - 1 - (1 if with_else else 0)
                for i in range(middle):
                    branches.append(Branch("elif", exprs[(length + i) % len(exprs)],
                                           [f"m{i};"]))
                if with_else:
                    branches.append(Branch("else", "", ["e;"]))
                structures.append([Chain(branches)])
    inner = Chain([Branch("ifndef", "B", ["x;"]), Branch("else", "", ["y;"])])
    structures.append([Chain([Branch("ifdef", "A", ["p;", inner]),
                              Branch("else", "", ["q;"])])])
    structures.append([Chain([Branch("if", "defined(A) && defined(B)", [inner])]),
                       "z;",
                       Chain([Branch("ifdef", "D", ["w;"])])])
    return structures


def test_acceptance_conditional_activity_exhaustive():
    grammar = load_builtin("c")
    symbols = ["A", "B", "C", "D"]
    combos = 0
    for items in _chain_structures():
        text = chain_source(items)
        source = SourceText.from_text(text)
        tree, diags = parse_blocks(source, grammar)
        assert diags == []
        regions = {n.open_line: n.id for n in tree
                   if n.kind == BlockKind.CONDITIONAL_REGION}
        for bits in range(2 ** len(symbols)):
            defines = frozenset(s for i, s in enumerate(symbols) if bits >> i & 1)
            activity = conditional_activity(tree, source, grammar, defines)
            assert activity.errors == ()
            got = {line: activity.active[bid] for line, bid in regions.items()}
            assert got == expected_activity(items, defines), (text, sorted(defines))
            combos += 1
    assert combos >= 2 ** 4 * 20
    print(f"PASS: conditional activity matches the truth-table oracle on "
          f"{combos} chain/define combinations (exhaustive 2^4 subsets)")


# ---------------------------------------------------------------------------
# 7. renderers over the corpus

def test_acceptance_renderers_on_corpus():
    svgs = ansis = 0
    for path, gname in corpus_cases():
        grammar = load_builtin(gname)
        text = path.read_text()
        source = SourceText.from_text(text)
        tree, _ = parse_blocks(source, grammar)
        rects = editor_rects(tree, source)
        root = ET.fromstring(render_svg(rects, [], source))
        rect_count = sum(1 for el in root if el.tag.endswith("rect"))
        assert rect_count == len(tree), path.name
        svgs += 1
        out = render_ansi(rects, source)
        assert ANSI_RE.sub("", out) == text, path.name
        ansis += 1
    print(f"PASS: {svgs} corpus SVGs well-formed with rect count = block "
          f"count; {ansis} ANSI renders strip back to the exact input")


# ---------------------------------------------------------------------------
# 8. CLI determinism and exit codes

def test_acceptance_cli_determinism_and_exit_codes(tmp_path, capsys):
    demo = tmp_path / "demo.c"
    demo.write_text(
        "void demo() {\n  int a = 1;\n  int b = 2;\n  if (a > 0) {\n"
        "    b = a + 1;\n  }\n  return b;\n}\n")
    broken = tmp_path / "broken.c"
    broken.write_text("void f() {\n")
    multi = tmp_path / "multi.c"
    multi.write_text(
        "void f() {\n  int a = 1;\n  int b = 2;\n  if (a) {\n    a = 2;\n"
        "    b = 3;\n  }\n  use(a, b);\n}\n")
    bad_grammar = tmp_path / "bad.grammar.json"
    bad_grammar.write_text('{"name": "x"}')
    good_grammar = tmp_path / "ok.grammar.json"
    good_grammar.write_text(
        '{"name": "ok", "blocks": [{"open": "{", "close": "}"}]}')
    model_out = tmp_path / "model.json"

    matrix = [
        (["render", str(demo), "--grammar", "c", "--format", "svg"], 0),
        (["render", str(demo), "--grammar", "c", "--format", "ansi"], 0),
        (["render", str(broken), "--grammar", "c", "--format", "svg"], 2),
        (["render", str(demo), "--grammar", "zz", "--format", "svg"], 1),
        (["render", str(tmp_path / "absent.c"), "--grammar", "c",
          "--format", "svg"], 1),
        (["overview", str(demo), "--grammar", "c", "--width", "100",
          "--height", "100", "--granularity", "1", "--out", str(model_out)], 0),
        (["overview", str(demo), "--grammar", "c", "--width", "100",
          "--height", "100", "--granularity", "1", "--from", "5", "--to", "99",
          "--out", str(model_out)], 1),
        (["extract", str(demo), "--grammar", "c", "--block", "5:4",
          "--name", "bump"], 0),
        (["extract", str(demo), "--grammar", "c", "--block", "1:0",
          "--name", "bump"], 3),
        (["extract", str(multi), "--grammar", "c", "--block", "5:4",
          "--name", "ex"], 3),
        (["extract", str(demo), "--grammar", "c", "--block", "5:4",
          "--name", "demo"], 3),
        (["extract", str(demo), "--grammar", "c", "--block", "5:4",
          "--name", "a", "--name", "b"], 1),
        (["grammar", "check", str(good_grammar)], 0),
        (["grammar", "check", str(bad_grammar)], 2),
    ]
    for argv, expected in matrix:
        first_code = run_cli(list(argv))
        first = capsys.readouterr().out
        second_code = run_cli(list(argv))
        second = capsys.readouterr().out
        assert first_code == expected, (argv, first_code)
        assert second_code == expected
        assert first == second, f"nondeterministic stdout for {argv}"

    # determinism across real process boundaries too
    cmd = [sys.executable, "-m", "brics", "render", str(demo),
           "--grammar", "c", "--format", "svg"]
    runs = [subprocess.run(cmd, capture_output=True, check=True).stdout
            for _ in range(2)]
    assert runs[0] == runs[1]
    print(f"PASS: CLI exit-code matrix ({len(matrix)} cases) honored with "
          f"byte-identical repeated output, in-process and subprocess")
