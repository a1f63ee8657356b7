from __future__ import annotations

from clozesmell.ingest import SourceFile, extract_methods, parse_file
from clozesmell.metrics import (
    compute_metrics,
    count_loc,
    count_parameters,
    cyclomatic_complexity,
    max_nesting,
    write_metrics_csv,
)


def _record(src: str):
    file = SourceFile(path="A.java", text=f"class A {{\n{src}\n}}\n", project="p")
    (record,) = extract_methods(parse_file(file), file)
    return record


def test_parameter_counts():
    assert count_parameters(_record("void f(){}")) == 0
    assert count_parameters(_record("int g(int a, String b, long c){return a;}")) == 3
    assert count_parameters(_record("void h(int... xs){}")) == 1  # varargs is one


def test_loc_single_line_method():
    assert count_loc(_record("void f(){}")) == 1


def test_loc_excludes_blank_and_comment_only_lines():
    record = _record("void f() {\n// comment only\nint x = 1;\n\n}")
    # decl, x assignment, closing brace
    assert count_loc(record) == 3


def test_loc_trailing_comment_still_counts():
    record = _record("void f() {\nint x = 1; // trailing\n}")
    assert count_loc(record) == 3


def test_loc_multiline_block_comment():
    record = _record("void f() {\n/*\nlong comment\n*/\nint x = 1;\n}")
    assert count_loc(record) == 3


def test_cyclo_straight_line_is_one():
    assert cyclomatic_complexity(_record("void f(){ int x = 1; x += 2; }")) == 1


def test_cyclo_if_with_and():
    record = _record("void f(int a, int b){ if (a > 0 && b > 0) { a++; } }")
    assert cyclomatic_complexity(record) == 3  # 1 + if + &&


def test_cyclo_ternary_counts_but_generics_do_not():
    assert cyclomatic_complexity(_record("int f(int a){ return a > 0 ? a : -a; }")) == 2
    record = _record("void f(java.util.List<?> xs, java.util.Map<String, ?> m){ xs.size(); }")
    assert cyclomatic_complexity(record) == 1


def test_cyclo_do_while_counts_once():
    record = _record("void f(int n){ do { n--; } while (n > 0); }")
    assert cyclomatic_complexity(record) == 2


def test_cyclo_switch_counts_cases_not_default():
    record = _record(
        "int f(int x){ switch (x) { case 1: return 1; case 2: return 2; default: return 0; } }"
    )
    assert cyclomatic_complexity(record) == 3  # 1 + two case labels


def test_cyclo_monotone_under_appended_if():
    base = "void f(int a){ int x = 0;%s }"
    record = _record(base % "")
    grown = _record(base % " if (a > 0) { x++; }")
    assert cyclomatic_complexity(grown) == cyclomatic_complexity(record) + 1


def test_nesting_straight_line_is_zero():
    assert max_nesting(_record("void f(){ int x = 1; }")) == 0


def test_nesting_three_levels():
    record = _record(
        "void f(int a){ if (a > 0) { for (;;) { if (a > 1) { a--; } } } }"
    )
    assert max_nesting(record) == 3


def test_nesting_ignores_array_initializers():
    record = _record("void f(){ int[][] t = {{1}, {2}}; }")
    assert max_nesting(record) == 0


def test_metrics_pure_and_repeatable(mini_records):
    for record in mini_records:
        assert compute_metrics(record) == compute_metrics(record)


def test_loc_bounded_by_line_span(mini_records):
    for record in mini_records:
        assert compute_metrics(record).loc <= record.end_line - record.start_line + 1


def test_fixture_metrics_match_readme(mini_records, readme_oracle):
    for record in mini_records:
        expected = readme_oracle["methods"][(record.class_name, record.method_name)]
        metrics = compute_metrics(record)
        where = f"{record.class_name}.{record.method_name}"
        assert metrics.nop == expected["nop"], where
        assert metrics.loc == expected["loc"], where
        assert metrics.cyclo == expected["cyclo"], where
        assert metrics.max_nesting == expected["nesting"], where


def test_nop_equals_parameter_name_count(mini_records):
    for record in mini_records:
        assert count_parameters(record) == len(record.parameter_names)


def test_csv_export_has_header(tmp_path, mini_records):
    rows = [(r, compute_metrics(r)) for r in mini_records[:3]]
    out = tmp_path / "metrics.csv"
    write_metrics_csv(rows, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "project,file,class,method,nop,loc,cyclo,max_nesting"
    assert len(lines) == 4
