"""Parser/validator tests, anchored on the program shapes the pipeline runs."""

from __future__ import annotations

import ast

import pytest

from langnav.navlang import (
    NavAst,
    ProgramParseError,
    SourceProgram,
    UnsupportedConstructError,
    parse_program,
    pretty_print,
    summarize_api_usage,
    validate_program,
)

OUTLET_PROGRAM = """\
def execute_command(image):
    image_patch = ImagePatch(image)
    outlet_patches = image_patch.find('outlet')
    outlet_patches.sort(key=lambda x: x.horizontal_center)
    middle_outlet = outlet_patches[len(outlet_patches) // 2]
    inputs = (middle_outlet.horizontal_center, middle_outlet.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [middle_outlet.left, middle_outlet.lower, middle_outlet.right, middle_outlet.upper]}
"""

SECOND_FLOOR_PROGRAM = """\
def execute_command(image):
    floor_patches = ImagePatch(image).find('floor')
    floor_patches.sort(key=lambda x: x.vertical_center)
    if len(floor_patches) < 2:
        return {'function': 'None', 'error': 'Image does not contain at least two floors.'}
    second_floor_patch = floor_patches[1]
    return {'function': 'navigate_to_object', 'inputs': (second_floor_patch.horizontal_center, second_floor_patch.vertical_center), 'box': [second_floor_patch.left, second_floor_patch.lower, second_floor_patch.right, second_floor_patch.upper]}
"""

FIREFIGHTER_PROGRAM = """\
def execute_command(image):
    image_patch = ImagePatch(image)
    helper_patches = []
    for name in ['fire extinguisher', 'fire hydrant']:
        found = image_patch.find(name)
        for patch in found:
            helper_patches.append(patch)
    if len(helper_patches) == 0:
        return {'function': 'None', 'error': 'No firefighting equipment found.'}
    target = helper_patches[0]
    return navigate_to_object(target.horizontal_center, target.vertical_center)
"""

MOVIE_PROGRAM = """\
def execute_command(image):
    image_patch = ImagePatch(image)
    screen_patches = image_patch.find('tv')
    if len(screen_patches) == 0:
        return {'function': 'None', 'error': 'No screen found.'}
    screen = screen_patches[0]
    seat_patches = image_patch.find('chair')
    couch_patches = image_patch.find('couch')
    for couch in couch_patches:
        seat_patches.append(couch)
    if len(seat_patches) == 0:
        return {'function': 'None', 'error': 'Nowhere to sit.'}
    seat_patches.sort(key=lambda x: distance(x, screen))
    best_seat = seat_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (best_seat.horizontal_center, best_seat.vertical_center), 'box': [best_seat.left, best_seat.lower, best_seat.right, best_seat.upper]}
"""

MINIMAL_PROGRAM = "def execute_command(image):\n    return None\n"

ALL_GOOD_PROGRAMS = [
    OUTLET_PROGRAM,
    SECOND_FLOOR_PROGRAM,
    FIREFIGHTER_PROGRAM,
    MOVIE_PROGRAM,
    MINIMAL_PROGRAM,
]


def parse(text: str) -> NavAst:
    return parse_program(SourceProgram(text=text))


class TestParse:
    def test_outlet_snippet_has_sort_key_and_subscription(self):
        nav = parse(OUTLET_PROGRAM)
        dump = nav.structure_dump()
        assert "Lambda" in dump
        assert "keyword(arg='key'" in dump
        assert "Subscript" in dump
        sort_calls = [
            n
            for n in ast.walk(nav.func)
            if isinstance(n, ast.Call)
            and isinstance(n.func, ast.Attribute)
            and n.func.attr == "sort"
        ]
        assert len(sort_calls) == 1
        assert sort_calls[0].keywords[0].arg == "key"

    def test_minimal_program(self):
        nav = parse(MINIMAL_PROGRAM)
        assert len(nav.func.body) == 1
        assert isinstance(nav.func.body[0], ast.Return)

    def test_import_rejected(self):
        text = "import os\n" + MINIMAL_PROGRAM
        with pytest.raises(UnsupportedConstructError) as err:
            parse(text)
        assert err.value.construct == "import"

    def test_import_inside_body_rejected(self):
        text = "def execute_command(image):\n    import os\n    return None\n"
        with pytest.raises(UnsupportedConstructError) as err:
            parse(text)
        assert err.value.construct == "import"
        assert err.value.line == 2

    def test_syntax_error_has_location(self):
        with pytest.raises(ProgramParseError) as err:
            parse("def execute_command(image)\n    return None\n")
        assert err.value.line == 1
        assert err.value.column >= 1

    def test_negative_index_allowed(self):
        text = (
            "def execute_command(image):\n"
            "    bar_patches = ImagePatch(image).find('bar')\n"
            "    return bar_patches[-1]\n"
        )
        parse(text)

    @pytest.mark.parametrize(
        "snippet,construct",
        [
            ("while True:\n        pass", "while loop"),
            ("x.y = 1", "attribute assignment"),
            ("try:\n        pass\n    except Exception:\n        pass", "exception handling"),
            ("def inner():\n        pass", "nested function definition"),
            ("x = [p for p in []]", "comprehension"),
            ("x = y[1:2]", "slice"),
            ("x += 1", "augmented assignment"),
            ("x = f'{1}'", "f-string"),
            ("x = 1 if True else 2", "conditional expression"),
        ],
    )
    def test_closed_node_set(self, snippet, construct):
        text = f"def execute_command(image):\n    {snippet}\n    return None\n"
        with pytest.raises(UnsupportedConstructError) as err:
            parse(text)
        assert err.value.construct == construct

    def test_wrong_function_name_rejected(self):
        with pytest.raises(UnsupportedConstructError):
            parse("def main(image):\n    return None\n")

    def test_two_parameters_rejected(self):
        with pytest.raises(UnsupportedConstructError):
            parse("def execute_command(a, b):\n    return None\n")

    def test_lambda_outside_key_rejected(self):
        text = "def execute_command(image):\n    f = lambda x: x\n    return None\n"
        with pytest.raises(UnsupportedConstructError) as err:
            parse(text)
        assert "lambda" in err.value.construct


class TestValidate:
    def test_firefighter_program_ok(self):
        nav = parse(FIREFIGHTER_PROGRAM)
        report = validate_program(nav)
        assert report.ok
        assert {"find", "navigate_to_object"} <= set(report.api_usage)

    def test_disallowed_global(self):
        text = "def execute_command(image):\n    x = open('x')\n    return None\n"
        report = validate_program(parse(text))
        assert not report.ok
        assert any("disallowed global: open" in d.message for d in report.errors())

    def test_disallowed_attribute(self):
        text = (
            "def execute_command(image):\n"
            "    patch = ImagePatch(image)\n"
            "    return patch.pixels\n"
        )
        report = validate_program(parse(text))
        assert not report.ok
        assert any("disallowed attribute" in d.message for d in report.errors())

    def test_disallowed_method(self):
        text = (
            "def execute_command(image):\n"
            "    patch = ImagePatch(image)\n"
            "    return patch.segment('x')\n"
        )
        report = validate_program(parse(text))
        assert any("disallowed method: segment" in d.message for d in report.errors())

    def test_disallowed_keyword(self):
        text = (
            "def execute_command(image):\n"
            "    patches = ImagePatch(image).find('x')\n"
            "    patches.sort(reverse=True)\n"
            "    return None\n"
        )
        report = validate_program(parse(text))
        assert any("disallowed keyword argument: reverse" in d.message for d in report.errors())

    def test_diagnostics_are_one_based(self):
        text = "def execute_command(image):\n    return open\n"
        report = validate_program(parse(text))
        err = report.errors()[0]
        assert err.line == 2
        assert err.column >= 1

    def test_validation_is_idempotent(self):
        nav = parse(MOVIE_PROGRAM)
        assert validate_program(nav) == validate_program(nav)

    @pytest.mark.parametrize("text", ALL_GOOD_PROGRAMS)
    def test_pipeline_programs_validate(self, text):
        assert validate_program(parse(text)).ok


class TestApiUsage:
    def test_outlet_program(self):
        assert summarize_api_usage(parse(OUTLET_PROGRAM)) == ["find", "sort"]

    def test_minimal_program(self):
        assert summarize_api_usage(parse(MINIMAL_PROGRAM)) == []

    def test_movie_program_source_order(self):
        usage = summarize_api_usage(parse(MOVIE_PROGRAM))
        assert usage[0] == "find"  # the tv query comes first
        find_positions = [i for i, name in enumerate(usage) if name == "find"]
        assert len(find_positions) == 3
        assert "distance" in usage
        assert usage.index("distance") > find_positions[0]


class TestRoundTrip:
    @pytest.mark.parametrize("text", ALL_GOOD_PROGRAMS)
    def test_pretty_print_reparse_identical(self, text):
        nav = parse(text)
        printed = pretty_print(nav)
        reparsed = parse_program(SourceProgram(text=printed))
        assert nav.structure_dump() == reparsed.structure_dump()
