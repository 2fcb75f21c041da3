"""Parser and static validator for the restricted navigation-program language.

The language's surface syntax is a closed subset of Python: a single
``execute_command(image)`` function whose body may use assignments, loops over
sequences, conditionals, returns, and a fixed expression vocabulary (calls,
attribute reads, integer subscription, comparisons, arithmetic including
floor-divide, literals, and single-parameter key lambdas). Everything else is
rejected up front, so downstream interpretation never sees a construct it does
not understand.

Parsing reuses CPython's ``ast`` module and then walks the tree against a
whitelist; validation checks every referenced global, method, attribute, and
keyword argument against the navigation API surface.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

# Globals callable from generated programs.
GLOBAL_ALLOWLIST = frozenset(
    {
        "ImagePatch",
        "best_image_match",
        "distance",
        "bool_to_yesno",
        "coerce_to_numeric",
        "llm_query",
        "navigate_to_object",
        "len",
        "sorted",
        "min",
        "max",
        "abs",
        "enumerate",
        "range",
    }
)

# Methods that may be invoked on patch receivers.
PATCH_METHODS = frozenset(
    {
        "find",
        "exists",
        "verify_property",
        "best_text_match",
        "simple_query",
        "compute_depth",
        "crop",
        "overlaps_with",
    }
)

# In-place sequence mutation used by generated code (sorting, accumulation).
SEQUENCE_METHODS = frozenset({"sort", "append"})

# Attributes readable on patch values.
PATCH_ATTRIBUTES = frozenset(
    {
        "left",
        "lower",
        "right",
        "upper",
        "width",
        "height",
        "horizontal_center",
        "vertical_center",
        "frame",
    }
)

# Keyword arguments the API documents; anything else is rejected.
ALLOWED_KEYWORDS = frozenset({"key", "return_index", "question", "long_answer"})

# Call names reported by summarize_api_usage: the navigation API itself,
# not generic builtins or the patch constructor.
_API_CALL_NAMES = PATCH_METHODS | SEQUENCE_METHODS | frozenset(
    {
        "best_image_match",
        "distance",
        "bool_to_yesno",
        "coerce_to_numeric",
        "llm_query",
        "navigate_to_object",
    }
)

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.FloorDiv, ast.Mod)
_ALLOWED_CMPOPS = (ast.Eq, ast.NotEq, ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.In, ast.NotIn)
_ALLOWED_UNARYOPS = (ast.USub, ast.UAdd, ast.Not)


class ProgramParseError(ValueError):
    """Syntax or unsupported-construct error with a 1-based source location."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnsupportedConstructError(ProgramParseError):
    """A syntactically valid Python construct outside the closed node set."""

    def __init__(self, construct: str, line: int, column: int):
        super().__init__(f"unsupported construct: {construct}", line, column)
        self.construct = construct


@dataclass(frozen=True)
class SourceProgram:
    """Program source text plus where it came from."""

    text: str
    origin: str = "inline"  # fixture | live-codegen | inline

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("program source is empty")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int
    column: int


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    diagnostics: tuple[Diagnostic, ...]
    api_usage: frozenset[str]

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


@dataclass(frozen=True)
class NavAst:
    """Parsed navigation program, already reduced to the closed node set."""

    module: ast.Module
    source: str

    @property
    def func(self) -> ast.FunctionDef:
        node = self.module.body[0]
        assert isinstance(node, ast.FunctionDef)
        return node

    @property
    def param_name(self) -> str:
        return self.func.args.args[0].arg

    def structure_dump(self) -> str:
        """Location-free dump used for structural AST comparison."""
        return ast.dump(self.module, include_attributes=False)


def _loc(node: ast.AST) -> tuple[int, int]:
    line = getattr(node, "lineno", 1)
    col = getattr(node, "col_offset", 0) + 1
    return line, col


def _reject(node: ast.AST, construct: str) -> None:
    line, col = _loc(node)
    raise UnsupportedConstructError(construct, line, col)


_CONSTRUCT_NAMES: dict[type, str] = {
    ast.Import: "import",
    ast.ImportFrom: "import",
    ast.While: "while loop",
    ast.Try: "exception handling",
    ast.Raise: "raise",
    ast.Assert: "assert",
    ast.With: "with block",
    ast.ClassDef: "class definition",
    ast.Delete: "delete",
    ast.Global: "global declaration",
    ast.Nonlocal: "nonlocal declaration",
    ast.AugAssign: "augmented assignment",
    ast.AnnAssign: "annotated assignment",
    ast.ListComp: "comprehension",
    ast.SetComp: "comprehension",
    ast.DictComp: "comprehension",
    ast.GeneratorExp: "generator expression",
    ast.IfExp: "conditional expression",
    ast.JoinedStr: "f-string",
    ast.Starred: "starred expression",
    ast.Set: "set literal",
    ast.Slice: "slice",
    ast.Await: "await",
    ast.Yield: "yield",
    ast.YieldFrom: "yield",
    ast.NamedExpr: "walrus assignment",
    ast.AsyncFunctionDef: "async function",
    ast.AsyncFor: "async for",
    ast.AsyncWith: "async with",
}


def _check_statement(stmt: ast.stmt) -> None:
    for bad, name in _CONSTRUCT_NAMES.items():
        if isinstance(stmt, bad):
            _reject(stmt, name)
    if isinstance(stmt, ast.FunctionDef):
        _reject(stmt, "nested function definition")
    if isinstance(stmt, ast.Assign):
        if len(stmt.targets) != 1:
            _reject(stmt, "chained assignment")
        target = stmt.targets[0]
        _check_assign_target(target)
        _check_expression(stmt.value)
    elif isinstance(stmt, ast.Expr):
        _check_expression(stmt.value)
    elif isinstance(stmt, ast.Return):
        if stmt.value is not None:
            _check_expression(stmt.value)
    elif isinstance(stmt, ast.If):
        _check_expression(stmt.test)
        for child in stmt.body:
            _check_statement(child)
        for child in stmt.orelse:
            _check_statement(child)
    elif isinstance(stmt, ast.For):
        if stmt.orelse:
            _reject(stmt, "for-else")
        _check_assign_target(stmt.target)
        _check_expression(stmt.iter)
        for child in stmt.body:
            _check_statement(child)
    elif isinstance(stmt, (ast.Break, ast.Continue, ast.Pass)):
        pass
    else:
        _reject(stmt, type(stmt).__name__.lower())


def _check_assign_target(target: ast.expr) -> None:
    if isinstance(target, ast.Name):
        return
    if isinstance(target, ast.Tuple):
        for elt in target.elts:
            if not isinstance(elt, ast.Name):
                _reject(elt, "non-name tuple assignment target")
        return
    if isinstance(target, ast.Attribute):
        _reject(target, "attribute assignment")
    if isinstance(target, ast.Subscript):
        _reject(target, "subscript assignment")
    _reject(target, "assignment target")


def _check_expression(expr: ast.expr, *, in_key_position: bool = False) -> None:
    for bad, name in _CONSTRUCT_NAMES.items():
        if isinstance(expr, bad):
            _reject(expr, name)
    if isinstance(expr, ast.Name):
        return
    if isinstance(expr, ast.Constant):
        if expr.value is None or isinstance(expr.value, (bool, int, float, str)):
            return
        _reject(expr, f"literal of type {type(expr.value).__name__}")
    elif isinstance(expr, ast.Attribute):
        _check_expression(expr.value)
    elif isinstance(expr, ast.Call):
        if not isinstance(expr.func, (ast.Name, ast.Attribute)):
            _reject(expr.func, "indirect call target")
        _check_expression(expr.func)
        for arg in expr.args:
            _check_expression(arg)
        for kw in expr.keywords:
            if kw.arg is None:
                _reject(kw.value, "keyword splat")
            _check_expression(kw.value, in_key_position=(kw.arg == "key"))
    elif isinstance(expr, ast.Subscript):
        _check_expression(expr.value)
        _check_expression(expr.slice)
    elif isinstance(expr, ast.Compare):
        for op in expr.ops:
            if not isinstance(op, _ALLOWED_CMPOPS):
                _reject(expr, f"comparison operator {type(op).__name__}")
        _check_expression(expr.left)
        for comp in expr.comparators:
            _check_expression(comp)
    elif isinstance(expr, ast.BoolOp):
        for value in expr.values:
            _check_expression(value)
    elif isinstance(expr, ast.BinOp):
        if not isinstance(expr.op, _ALLOWED_BINOPS):
            _reject(expr, f"operator {type(expr.op).__name__}")
        _check_expression(expr.left)
        _check_expression(expr.right)
    elif isinstance(expr, ast.UnaryOp):
        if not isinstance(expr.op, _ALLOWED_UNARYOPS):
            _reject(expr, f"unary operator {type(expr.op).__name__}")
        _check_expression(expr.operand)
    elif isinstance(expr, (ast.List, ast.Tuple)):
        for elt in expr.elts:
            _check_expression(elt)
    elif isinstance(expr, ast.Dict):
        for key in expr.keys:
            if key is None:
                _reject(expr, "mapping splat")
            if not (isinstance(key, ast.Constant) and isinstance(key.value, str)):
                _reject(key, "non-string mapping key")
        for value in expr.values:
            _check_expression(value)
    elif isinstance(expr, ast.Lambda):
        if not in_key_position:
            _reject(expr, "lambda outside key argument")
        args = expr.args
        if (
            len(args.args) != 1
            or args.posonlyargs
            or args.kwonlyargs
            or args.vararg
            or args.kwarg
            or args.defaults
        ):
            _reject(expr, "lambda with other than one plain parameter")
        _check_expression(expr.body)
    else:
        _reject(expr, type(expr).__name__.lower())


def parse_program(src: SourceProgram) -> NavAst:
    """Parse source into a NavAst, rejecting anything outside the closed set.

    Raises ProgramParseError (with 1-based line/column) for syntax errors and
    UnsupportedConstructError naming the offending construct.
    """
    try:
        module = ast.parse(src.text)
    except SyntaxError as exc:
        raise ProgramParseError(
            exc.msg or "syntax error", exc.lineno or 1, (exc.offset or 1)
        ) from exc

    if len(module.body) != 1 or not isinstance(module.body[0], ast.FunctionDef):
        if module.body:
            first = module.body[0]
            for bad, name in _CONSTRUCT_NAMES.items():
                if isinstance(first, bad):
                    _reject(first, name)
        raise ProgramParseError(
            "program must be a single function definition", 1, 1
        )
    func = module.body[0]
    if func.name != "execute_command":
        _reject(func, f"function named {func.name!r} (expected execute_command)")
    args = func.args
    if (
        len(args.args) != 1
        or args.posonlyargs
        or args.kwonlyargs
        or args.vararg
        or args.kwarg
        or args.defaults
    ):
        _reject(func, "execute_command must take exactly one parameter")
    if func.decorator_list:
        _reject(func.decorator_list[0], "decorator")
    for stmt in func.body:
        _check_statement(stmt)
    return NavAst(module=module, source=src.text)


class _Validator(ast.NodeVisitor):
    def __init__(self, bound_names: set[str]):
        self.bound = bound_names
        self.diagnostics: list[Diagnostic] = []
        self.api_usage: set[str] = set()
        self._lambda_params: list[str] = []

    def _error(self, node: ast.AST, message: str) -> None:
        line, col = _loc(node)
        self.diagnostics.append(Diagnostic("error", message, line, col))

    def _warn(self, node: ast.AST, message: str) -> None:
        line, col = _loc(node)
        self.diagnostics.append(Diagnostic("warning", message, line, col))

    def visit_Name(self, node: ast.Name) -> None:
        if isinstance(node.ctx, ast.Load):
            name = node.id
            if (
                name not in self.bound
                and name not in self._lambda_params
                and name not in GLOBAL_ALLOWLIST
            ):
                self._error(node, f"disallowed global: {name}")
            elif name in GLOBAL_ALLOWLIST and name not in self.bound:
                self.api_usage.add(name)

    def visit_Attribute(self, node: ast.Attribute) -> None:
        # Call receivers are checked in visit_Call; plain reads must be
        # patch attributes.
        if node.attr not in PATCH_ATTRIBUTES:
            self._error(node, f"disallowed attribute: {node.attr}")
        self.visit(node.value)

    def visit_Call(self, node: ast.Call) -> None:
        func = node.func
        if isinstance(func, ast.Attribute):
            method = func.attr
            if method in PATCH_METHODS or method in SEQUENCE_METHODS:
                self.api_usage.add(method)
            else:
                self._error(node, f"disallowed method: {method}")
            self.visit(func.value)
        elif isinstance(func, ast.Name):
            self.visit(func)
        for kw in node.keywords:
            if kw.arg not in ALLOWED_KEYWORDS:
                self._error(node, f"disallowed keyword argument: {kw.arg}")
        for arg in node.args:
            self.visit(arg)
        for kw in node.keywords:
            self.visit(kw.value)

    def visit_Lambda(self, node: ast.Lambda) -> None:
        self._lambda_params.append(node.args.args[0].arg)
        self.visit(node.body)
        self._lambda_params.pop()


def _collect_bound_names(func: ast.FunctionDef) -> set[str]:
    bound = {func.args.args[0].arg}
    for node in ast.walk(func):
        if isinstance(node, ast.Assign):
            target = node.targets[0]
            if isinstance(target, ast.Name):
                bound.add(target.id)
            elif isinstance(target, ast.Tuple):
                bound.update(elt.id for elt in target.elts if isinstance(elt, ast.Name))
        elif isinstance(node, ast.For):
            target = node.target
            if isinstance(target, ast.Name):
                bound.add(target.id)
            elif isinstance(target, ast.Tuple):
                bound.update(elt.id for elt in target.elts if isinstance(elt, ast.Name))
    return bound


def validate_program(nav_ast: NavAst) -> ValidationReport:
    """Check every global, method, attribute, and keyword against the API.

    Never raises; problems are returned as diagnostics and ok is True only
    when no error-severity diagnostic is present.
    """
    func = nav_ast.func
    validator = _Validator(_collect_bound_names(func))
    for stmt in func.body:
        validator.visit(stmt)
    has_return = any(isinstance(n, ast.Return) for n in ast.walk(func))
    if not has_return:
        validator._warn(func, "execute_command never returns a result")
    diagnostics = tuple(validator.diagnostics)
    ok = not any(d.severity == "error" for d in diagnostics)
    return ValidationReport(ok=ok, diagnostics=diagnostics, api_usage=frozenset(validator.api_usage))


def summarize_api_usage(nav_ast: NavAst) -> list[str]:
    """Pre-order listing of navigation API calls (source order)."""
    calls: list[str] = []

    class _Walker(ast.NodeVisitor):
        def visit_Call(self, node: ast.Call) -> None:
            name = None
            if isinstance(node.func, ast.Attribute):
                name = node.func.attr
            elif isinstance(node.func, ast.Name):
                name = node.func.id
            if name in _API_CALL_NAMES:
                calls.append(name)
            self.generic_visit(node)

    _Walker().visit(nav_ast.func)
    return calls


def pretty_print(nav_ast: NavAst) -> str:
    """Canonical source form of a parsed program (re-parseable)."""
    return ast.unparse(nav_ast.module)
