"""Curated extract-method snippets.

Each case names a target block by (kind, occurrence index) within the
parse order. `extract` says what extract_block should do:
  "ok"            extraction succeeds (0 or 1 outputs)
  "multi_output"  E_MULTI_OUTPUT
  "no_method"     E_NO_METHOD
Dependency sets are always compared against the brute-force oracle.
"""

CASES = [
    {
        "name": "spec_worked_example",
        "text": (
            "int f() {\n"
            "    int a = 1;\n"
            "    int b = 2;\n"
            "    if (a > 0) {\n"
            "        b = a + 1;\n"
            "    }\n"
            "    return b;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["a", "b"],
        "expect_outputs": ["b"],
    },
    {
        "name": "no_external_refs",
        "text": (
            "int f() {\n"
            "    int out = 0;\n"
            "    if (out == 0) {\n"
            "        int y = 1;\n"
            "        y = y + 1;\n"
            "    }\n"
            "    return out;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_outputs": [],
    },
    {
        "name": "two_outputs",
        "text": (
            "int f() {\n"
            "    int a = 1;\n"
            "    int b = 2;\n"
            "    if (a < b) {\n"
            "        a = b;\n"
            "        b = a * 2;\n"
            "    }\n"
            "    total = a + b;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "multi_output",
        "expect_outputs": ["a", "b"],
    },
    {
        "name": "loop_counter",
        "text": (
            "int sum(int n) {\n"
            "    int total = 0;\n"
            "    int i = 0;\n"
            "    while (i < n) {\n"
            "        total = total + i;\n"
            "        i++;\n"
            "    }\n"
            "    return total + i;\n"
            "}\n"
        ),
        "target": ("loop", 0),
        "extract": "multi_output",
        "expect_outputs": ["total", "i"],
    },
    {
        "name": "loop_single_output",
        "text": (
            "int sum(int n) {\n"
            "    int total = 0;\n"
            "    int i = 0;\n"
            "    while (i < n) {\n"
            "        total = total + 1;\n"
            "    }\n"
            "    return total;\n"
            "}\n"
        ),
        "target": ("loop", 0),
        "extract": "ok",
        "expect_inputs": ["i", "n", "total"],
        "expect_outputs": ["total"],
    },
    {
        "name": "reads_param",
        "text": (
            "int scale(int factor) {\n"
            "    int v = 10;\n"
            "    if (factor > 1) {\n"
            "        v = v * factor;\n"
            "    }\n"
            "    return v;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["factor", "v"],
        "expect_outputs": ["v"],
    },
    {
        "name": "undeclared_global_not_input",
        "text": (
            "int f() {\n"
            "    int local = 1;\n"
            "    if (local) {\n"
            "        global_counter = global_counter + local;\n"
            "    }\n"
            "    return local;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["local"],
        "expect_outputs": [],
    },
    {
        "name": "output_via_increment",
        "text": (
            "int f() {\n"
            "    int hits = 0;\n"
            "    if (probe()) {\n"
            "        hits++;\n"
            "    }\n"
            "    return hits;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["hits"],
        "expect_outputs": ["hits"],
    },
    {
        "name": "output_via_decrement",
        "text": (
            "int f() {\n"
            "    int fuel = 9;\n"
            "    while (fuel) {\n"
            "        fuel--;\n"
            "    }\n"
            "    return fuel;\n"
            "}\n"
        ),
        "target": ("loop", 0),
        "extract": "ok",
        "expect_outputs": ["fuel"],
    },
    {
        "name": "assigned_not_read_after",
        "text": (
            "void f() {\n"
            "    int t = 0;\n"
            "    if (ready()) {\n"
            "        t = 5;\n"
            "    }\n"
            "    done();\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["t"],
        "expect_outputs": [],
    },
    {
        # lexical rule: declaration inside the block removes x from the
        # inputs, but the assignment still counts toward outputs because
        # x is referenced after the block
        "name": "shadowing_declaration",
        "text": (
            "int f() {\n"
            "    int x = 1;\n"
            "    if (x) {\n"
            "        int x = 2;\n"
            "        use(x);\n"
            "    }\n"
            "    return x;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": [],
        "expect_outputs": ["x"],
    },
    {
        "name": "strings_and_comments_ignored",
        "text": (
            "int f() {\n"
            "    int n = 3;\n"
            "    if (n) {\n"
            "        log(\"n = fake\"); // n = also fake\n"
            "        n = n - 1;\n"
            "    }\n"
            "    return n;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["n"],
        "expect_outputs": ["n"],
    },
    {
        "name": "nested_pick_inner",
        "text": (
            "int f() {\n"
            "    int acc = 0;\n"
            "    int k = 4;\n"
            "    while (k) {\n"
            "        if (k > 2) {\n"
            "            acc = acc + k;\n"
            "        }\n"
            "        k--;\n"
            "    }\n"
            "    return acc;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["k", "acc"],
        "expect_outputs": ["acc"],
    },
    {
        "name": "outer_loop_multi",
        "text": (
            "int f() {\n"
            "    int acc = 0;\n"
            "    int k = 4;\n"
            "    while (k) {\n"
            "        if (k > 2) {\n"
            "            acc = acc + k;\n"
            "        }\n"
            "        k--;\n"
            "    }\n"
            "    return acc + k;\n"
            "}\n"
        ),
        "target": ("loop", 0),
        "extract": "multi_output",
        "expect_outputs": ["acc", "k"],
    },
    {
        "name": "call_args_only",
        "text": (
            "void f(int a, int b) {\n"
            "    if (a) {\n"
            "        emit(a, b);\n"
            "        emit(b, a);\n"
            "    }\n"
            "    flush();\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["a", "b"],
        "expect_outputs": [],
    },
    {
        # Allman-style else: the target block must own its lines, a
        # "} else {" opener line would also carry the if-block's closer.
        "name": "else_block",
        "text": (
            "int f(int q) {\n"
            "    int r = 0;\n"
            "    if (q) {\n"
            "        r = 1;\n"
            "    }\n"
            "    else {\n"
            "        r = 2;\n"
            "    }\n"
            "    return r;\n"
            "}\n"
        ),
        "target": ("branch", 1),
        "extract": "ok",
        "expect_inputs": ["r"],
        "expect_outputs": ["r"],
    },
    {
        "name": "for_header_decl",
        "text": (
            "int f(int n) {\n"
            "    int sum = 0;\n"
            "    for (int i = 0; i < n; i++) {\n"
            "        sum = sum + i;\n"
            "    }\n"
            "    return sum;\n"
            "}\n"
        ),
        "target": ("loop", 0),
        "extract": "ok",
        "expect_inputs": ["n", "sum"],
        "expect_outputs": ["sum"],
    },
    {
        "name": "top_level_block_no_method",
        "text": (
            "struct config {\n"
            "    int level;\n"
            "};\n"
        ),
        "target": ("generic", 0),
        "extract": "no_method",
    },
    {
        "name": "method_itself_no_method",
        "text": (
            "void f() {\n"
            "    step();\n"
            "}\n"
        ),
        "target": ("callable", 0),
        "extract": "no_method",
    },
    {
        "name": "deep_nesting_three",
        "text": (
            "int f(int n) {\n"
            "    int acc = 0;\n"
            "    if (n > 0) {\n"
            "        while (n) {\n"
            "            if (n > 5) {\n"
            "                acc = acc + n;\n"
            "            }\n"
            "            n--;\n"
            "        }\n"
            "    }\n"
            "    return acc;\n"
            "}\n"
        ),
        "target": ("branch", 1),
        "extract": "ok",
        "expect_inputs": ["n", "acc"],
        "expect_outputs": ["acc"],
    },
    {
        "name": "uses_default_type",
        "text": (
            "int f() {\n"
            "    v = seed();\n"
            "    if (v) {\n"
            "        v = v + 1;\n"
            "    }\n"
            "    return v;\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "ok",
        "expect_inputs": ["v"],
        "expect_outputs": ["v"],
    },
    {
        "name": "single_line_statements_multi",
        "text": (
            "void f() {\n"
            "    int a = 0;\n"
            "    int b = 0;\n"
            "    int c = 0;\n"
            "    if (probe()) {\n"
            "        a = 1;\n"
            "        b = 2;\n"
            "        c = 3;\n"
            "    }\n"
            "    report(a, b, c);\n"
            "}\n"
        ),
        "target": ("branch", 0),
        "extract": "multi_output",
        "expect_outputs": ["a", "b", "c"],
    },
    {
        "name": "while_with_call_and_string",
        "text": (
            "int f(int n) {\n"
            "    int lines = 0;\n"
            "    while (n > 0) {\n"
            "        print(\"line {\");\n"
            "        lines = lines + 1;\n"
            "        n = n - 1;\n"
            "    }\n"
            "    return lines + n;\n"
            "}\n"
        ),
        "target": ("loop", 0),
        "extract": "multi_output",
        "expect_outputs": ["lines", "n"],
    },
]
