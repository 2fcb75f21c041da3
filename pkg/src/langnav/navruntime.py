"""Tree-walking interpreter for validated navigation programs.

Executes ``execute_command`` against a rendered view set, implementing the
patch API (find / exists / verify_property / best_text_match / simple_query /
compute_depth / crop / overlaps_with), the helper functions, and the result
contract. Execution is metered by a step budget, every patch ever constructed
is recorded in the trace, and all failures surface as a NavResult carrying an
error rather than as exceptions.

Representation A executes over a single padded panorama; representation B
executes over a merged root whose find() concatenates per-frame results in
frame-local coordinates (left, front, right) - which is exactly the behavior
that makes cross-frame ordering unreliable in that mode.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import worldsim
from .navlang import NavAst
from .projection import assemble_representation
from .worldsim import NO_GEOMETRY_DEPTH, Detection, SceneSpec, ViewSet

DEFAULT_STEP_BUDGET = 100_000
SEQUENCE_CAP = 10_000

FRAME_PRECEDENCE = {"front": 0, "left": 1, "right": 2, "panorama": 3, "merged": 4}


class NavRuntimeError(Exception):
    """Any runtime failure of a navigation program (budget, types, indexing)."""


@dataclass(frozen=True)
class NavResult:
    function: str  # "navigate_to_object" | "None"
    inputs: tuple[float, float] | None = None
    box: tuple[float, float, float, float] | None = None
    error: str | None = None
    frame: str | None = None
    normalized: bool = False

    def __post_init__(self) -> None:
        if self.function == "None":
            assert self.error is not None and self.inputs is None and self.box is None
        else:
            assert self.inputs is not None and self.box is not None

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "inputs": list(self.inputs) if self.inputs else None,
            "box": list(self.box) if self.box else None,
            "error": self.error,
            "frame": self.frame,
            "normalized": self.normalized,
        }


def error_result(message: str) -> NavResult:
    return NavResult(function="None", error=message)


@dataclass
class ExecutionTrace:
    steps_used: int = 0
    api_calls: list[dict] = field(default_factory=list)
    patch_registry: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def record_call(self, name: str, args: str, result: str) -> None:
        self.api_calls.append({"name": name, "args": args, "result": result})

    def to_dict(self) -> dict:
        return {
            "steps_used": self.steps_used,
            "api_calls": self.api_calls,
            "patch_registry": self.patch_registry,
            "notes": self.notes,
        }


class PatchValue:
    """Runtime image patch: absolute bounds in its owning view plus a frame tag."""

    __slots__ = ("left", "lower", "right", "upper", "frame", "ctx")

    def __init__(self, left, lower, right, upper, frame: str, ctx: "ExecutionContext"):
        self.left = float(left)
        self.lower = float(lower)
        self.right = float(right)
        self.upper = float(upper)
        self.frame = frame
        self.ctx = ctx

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.upper - self.lower

    @property
    def horizontal_center(self) -> float:
        return (self.left + self.right) / 2

    @property
    def vertical_center(self) -> float:
        return (self.lower + self.upper) / 2

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.left, self.lower, self.right, self.upper)

    def __repr__(self) -> str:
        return (
            f"patch({self.left:.1f},{self.lower:.1f},{self.right:.1f},{self.upper:.1f}"
            f"@{self.frame})"
        )


class RootImageValue:
    """Value bound to execute_command's parameter: a handle to the root view."""

    __slots__ = ("ctx",)

    def __init__(self, ctx: "ExecutionContext"):
        self.ctx = ctx

    def __repr__(self) -> str:
        return f"<view {self.ctx.mode}>"


class ExecutionContext:
    """Immutable world snapshot plus the per-execution trace and registry."""

    def __init__(
        self,
        views: ViewSet,
        mode: str,
        seed: int = 0,
        qa_fixtures=None,
        trace: ExecutionTrace | None = None,
    ):
        self.views = views
        self.scene: SceneSpec = views.scene
        self.mode = mode
        self.seed = seed
        self.root_view = assemble_representation(views, mode)
        self.trace = trace or ExecutionTrace()
        self._qa = qa_fixtures
        if mode == "A":
            layout = self.root_view.layout
            self.root_bounds = (0.0, 0.0, float(layout.total_width), float(self.root_view.height))
            self.root_frame = "panorama"
        else:
            self.root_bounds = (0.0, 0.0, float(self.root_view.width), float(self.root_view.height))
            self.root_frame = "merged"

    # -- patches ----------------------------------------------------------

    def new_patch(self, left, lower, right, upper, frame: str) -> PatchValue:
        patch = PatchValue(left, lower, right, upper, frame, self)
        self.trace.patch_registry.append(
            {"box": [patch.left, patch.lower, patch.right, patch.upper], "frame": frame}
        )
        return patch

    def root_patch(self) -> PatchValue:
        return self.new_patch(*self.root_bounds, frame=self.root_frame)

    # -- frame window decomposition ----------------------------------------

    def frame_windows(self, patch: PatchValue) -> list[tuple[str, tuple[float, float, float, float], float]]:
        """(frame, frame-local window, panorama offset) triples under a patch.

        For panorama patches the window is translated into frame-local
        coordinates and the offset maps results back; for merged patches the
        same local window applies to all three frames; for concrete frames
        the window is the patch itself.
        """
        l, b, r, t = patch.bounds
        if patch.frame == "panorama":
            layout = self.root_view.layout
            out = []
            for frame in layout.frame_order:
                off, end = layout.frame_span(frame)
                il, ir = max(l, off), min(r, end)
                if ir > il:
                    out.append((frame, (il - off, b, ir - off, t), float(off)))
            return out
        if patch.frame == "merged":
            return [(frame, (l, b, r, t), 0.0) for frame in ("left", "front", "right")]
        return [(patch.frame, (l, b, r, t), 0.0)]

    # -- detection ----------------------------------------------------------

    def find_detections(self, patch: PatchValue, query: str) -> list[tuple[Detection, float, str]]:
        """Detections under a patch as (detection, x-offset, result frame).

        Panorama: all frames merged into one coordinate space, deduplicated by
        object (an object straddling a seam keeps its best fragment), globally
        sorted by score then horizontal center. Merged (mode B): per-frame
        lists concatenated left, front, right in frame-local coordinates.
        """
        windows = self.frame_windows(patch)
        per_frame: list[list[tuple[Detection, float, str]]] = []
        for frame, window, offset in windows:
            dets = worldsim.synthetic_detect(self.views, query, window, frame, seed=self.seed)
            if patch.frame == "panorama":
                per_frame.append([(d, offset, "panorama") for d in dets])
            elif patch.frame == "merged":
                per_frame.append([(d, 0.0, frame) for d in dets])
            else:
                per_frame.append([(d, 0.0, patch.frame) for d in dets])
        if patch.frame == "panorama":
            best: dict[str, tuple[Detection, float, str]] = {}
            for group in per_frame:
                for det, off, rframe in group:
                    prev = best.get(det.object_id)
                    if prev is None or (
                        det.score,
                        -FRAME_PRECEDENCE[det.frame],
                    ) > (prev[0].score, -FRAME_PRECEDENCE[prev[0].frame]):
                        best[det.object_id] = (det, off, rframe)
            merged = list(best.values())
            merged.sort(
                key=lambda item: (
                    -item[0].score,
                    item[0].horizontal_center + item[1],
                    item[0].object_id,
                )
            )
            return merged
        return [item for group in per_frame for item in group]

    def dominant_object(
        self, patch: PatchValue, query: str | None = None
    ) -> Detection | None:
        """Detected object with the largest intersection area with the crop;
        ties break by score, then object id. `query` restricts candidates."""
        candidates: list[Detection] = []
        for frame, window, _off in self.frame_windows(patch):
            if query is None:
                candidates.extend(worldsim.visible_objects(self.views, window, frame))
            else:
                candidates.extend(
                    worldsim.synthetic_detect(self.views, query, window, frame, seed=self.seed)
                )
        if not candidates:
            return None
        seen: dict[str, Detection] = {}
        for det in candidates:
            area = (det.right - det.left) * (det.upper - det.lower)
            prev = seen.get(det.object_id)
            if prev is None:
                seen[det.object_id] = det
            else:
                prev_area = (prev.right - prev.left) * (prev.upper - prev.lower)
                if (area, det.score) > (prev_area, prev.score):
                    seen[det.object_id] = det
        ranked = sorted(
            seen.values(),
            key=lambda d: (-(d.right - d.left) * (d.upper - d.lower), -d.score, d.object_id),
        )
        return ranked[0]

    # -- QA fixtures ----------------------------------------------------------

    def qa_answer(self, object_id: str | None, question: str) -> str | None:
        if self._qa is not None:
            norm = worldsim.normalize_question(question)
            for fx in self._qa:
                if fx.object_id == object_id and fx.question == norm:
                    return fx.answer
            return None
        return self.scene.qa_lookup(object_id, question)


# ---------------------------------------------------------------------------
# patch operations (exposed for direct use and tested individually)


def _summ(value) -> str:
    text = repr(value)
    return text if len(text) <= 120 else text[:117] + "..."


def patch_find(patch: PatchValue, object_name: str) -> list[PatchValue]:
    if not object_name:
        raise NavRuntimeError("find: object name must be non-empty")
    ctx = patch.ctx
    out = []
    for det, offset, frame in ctx.find_detections(patch, object_name):
        child = ctx.new_patch(
            det.left + offset, det.lower, det.right + offset, det.upper, frame
        )
        out.append(child)
    ctx.trace.record_call("find", _summ(object_name), f"{len(out)} patches")
    return out


def patch_exists(patch: PatchValue, object_name: str) -> bool:
    found = patch_find(patch, object_name)
    result = len(found) > 0
    patch.ctx.trace.record_call("exists", _summ(object_name), str(result))
    return result


def patch_verify_property(patch: PatchValue, object_name: str, visual_property: str) -> bool:
    ctx = patch.ctx
    dom = ctx.dominant_object(patch, query=object_name)
    if dom is None:
        ctx.trace.notes.append(
            f"verify_property: no {object_name!r} in crop (presupposition failure)"
        )
        ctx.trace.record_call(
            "verify_property", f"{object_name!r}, {visual_property!r}", "False"
        )
        return False
    result = worldsim.attribute_oracle(ctx.scene, dom.object_id, visual_property)
    ctx.trace.record_call(
        "verify_property", f"{object_name!r}, {visual_property!r}", str(result)
    )
    return result


def patch_best_text_match(patch: PatchValue, options: list) -> str:
    if not options:
        raise NavRuntimeError("best_text_match: options must be non-empty")
    for opt in options:
        if not isinstance(opt, str):
            raise NavRuntimeError("best_text_match: options must be strings")
    ctx = patch.ctx
    dom = ctx.dominant_object(patch)
    candidate_tokens: set[str] = set()
    if dom is not None:
        obj = ctx.scene.object_by_id(dom.object_id)
        candidate_tokens = set(worldsim.tokens(obj.label)) | set(obj.attributes)
    best_opt, best_score = options[0], -1
    for opt in options:
        score = len(set(worldsim.tokens(opt)) & candidate_tokens)
        if score > best_score:
            best_opt, best_score = opt, score
    ctx.trace.record_call("best_text_match", _summ(options), _summ(best_opt))
    return best_opt


def patch_simple_query(patch: PatchValue, question: str | None = None) -> str:
    ctx = patch.ctx
    dom = ctx.dominant_object(patch)
    if question is None:
        answer = ctx.scene.object_by_id(dom.object_id).label if dom else "nothing"
        ctx.trace.record_call("simple_query", "None", _summ(answer))
        return answer
    if not isinstance(question, str):
        raise NavRuntimeError("simple_query: question must be a string")
    answer = ctx.qa_answer(dom.object_id if dom else None, question)
    if answer is None:
        ctx.trace.notes.append(f"simple_query: no fixture for {question!r}")
        answer = "no fixture"
    ctx.trace.record_call("simple_query", _summ(question), _summ(answer))
    return answer


def patch_compute_depth(patch: PatchValue) -> float:
    """Median ground-truth depth inside the patch; empty geometry reads 30 m."""
    ctx = patch.ctx
    values: list[np.ndarray] = []
    for frame, window, _off in ctx.frame_windows(patch):
        camera = ctx.views.frame(frame).camera
        raster = worldsim.depth_window(ctx.scene, camera, *window)
        if raster.size:
            values.append(raster.ravel())
    if patch.frame == "panorama":
        pad_pixels = _panorama_pad_pixels(ctx, patch)
        if pad_pixels:
            values.append(np.full(pad_pixels, NO_GEOMETRY_DEPTH))
    if not values:
        result = NO_GEOMETRY_DEPTH
    else:
        result = float(np.median(np.concatenate(values)))
    ctx.trace.record_call("compute_depth", "", f"{result:.3f}")
    return result


def _panorama_pad_pixels(ctx: ExecutionContext, patch: PatchValue) -> int:
    layout = ctx.root_view.layout
    l, b, r, t = patch.bounds
    rows = max(
        0,
        min(int(math.ceil(t)), ctx.root_view.height) - max(int(math.floor(b)), 0),
    )
    cols = 0
    for frame in layout.frame_order[:-1]:
        _, end = layout.frame_span(frame)
        pad_l, pad_r = end, end + layout.pad_px
        il, ir = max(l, pad_l), min(r, pad_r)
        if ir > il:
            cols += max(0, int(math.ceil(ir)) - int(math.floor(il)))
    return cols * rows


def patch_crop(patch: PatchValue, left, lower, right, upper) -> PatchValue:
    """Crop clamped inside the parent; coordinates stay absolute in the view."""
    for v in (left, lower, right, upper):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise NavRuntimeError("crop: bounds must be numbers")
    l = min(max(float(left), patch.left), patch.right)
    r = min(max(float(right), patch.left), patch.right)
    b = min(max(float(lower), patch.lower), patch.upper)
    t = min(max(float(upper), patch.lower), patch.upper)
    if r < l:
        l = r = max(l, r)
    if t < b:
        b = t = max(b, t)
    child = patch.ctx.new_patch(l, b, r, t, patch.frame)
    patch.ctx.trace.record_call("crop", f"({left}, {lower}, {right}, {upper})", _summ(child))
    return child


def patch_overlaps_with(patch: PatchValue, left, lower, right, upper) -> bool:
    result = (
        patch.left <= right
        and patch.right >= left
        and patch.lower <= upper
        and patch.upper >= lower
    )
    patch.ctx.trace.record_call(
        "overlaps_with", f"({left}, {lower}, {right}, {upper})", str(result)
    )
    return bool(result)


# ---------------------------------------------------------------------------
# helper functions (globals available to programs)


def helper_distance(a: PatchValue, b: PatchValue) -> float:
    """Negative IoU for overlapping boxes, else the hypot of the axis gaps."""
    if not isinstance(a, PatchValue) or not isinstance(b, PatchValue):
        raise NavRuntimeError("distance: both arguments must be patches")
    if a.frame != b.frame:
        a.ctx.trace.notes.append(
            f"distance: cross-frame pair ({a.frame} vs {b.frame}) compared on raw coordinates"
        )
    il = max(a.left, b.left)
    ir = min(a.right, b.right)
    ib = max(a.lower, b.lower)
    it = min(a.upper, b.upper)
    iw = ir - il
    ih = it - ib
    if iw > 0 and ih > 0:
        inter = iw * ih
        area_a = max(a.width, 0.0) * max(a.height, 0.0)
        area_b = max(b.width, 0.0) * max(b.height, 0.0)
        union = area_a + area_b - inter
        if union <= 0:
            return 0.0
        return -inter / union
    gap_x = max(0.0, a.left - b.right, b.left - a.right)
    gap_y = max(0.0, a.lower - b.upper, b.lower - a.upper)
    return math.hypot(gap_x, gap_y)


def helper_best_image_match(patches: list, content: list, return_index: bool = False):
    """Patch whose dominant object best token-matches the content strings."""
    if not isinstance(patches, list) or not patches:
        raise NavRuntimeError("best_image_match: patches must be a non-empty list")
    for p in patches:
        if not isinstance(p, PatchValue):
            raise NavRuntimeError("best_image_match: patches must contain patches")
    if isinstance(content, str):
        content = [content]
    want: set[str] = set()
    for item in content:
        want |= set(worldsim.tokens(str(item)))
    best_idx, best_score = 0, -1
    for idx, p in enumerate(patches):
        dom = p.ctx.dominant_object(p)
        have: set[str] = set()
        if dom is not None:
            obj = p.ctx.scene.object_by_id(dom.object_id)
            have = set(worldsim.tokens(obj.label)) | set(obj.attributes)
        score = len(want & have)
        if score > best_score:
            best_idx, best_score = idx, score
    patches[0].ctx.trace.record_call(
        "best_image_match", _summ(content), f"index {best_idx}"
    )
    return best_idx if return_index else patches[best_idx]


_RANGE_RE = re.compile(r"(?<=[0-9])-(?=[0-9])")


def helper_coerce_to_numeric(value) -> float:
    """Strip non-numeric characters; a digit-dash-digit pattern is a range
    and yields its first value."""
    text = str(value)
    kept = "".join(c for c in text if c in "0123456789.-")
    if not kept:
        raise NavRuntimeError(f"coerce_to_numeric: nothing numeric in {text!r}")
    parts = _RANGE_RE.split(kept, maxsplit=1)
    token = parts[0]
    try:
        return float(token)
    except ValueError:
        # strip stray dashes/dots that are not part of a leading sign
        cleaned = re.sub(r"(?!^)-", "", token)
        try:
            return float(cleaned)
        except ValueError:
            raise NavRuntimeError(f"coerce_to_numeric: cannot parse {text!r}") from None


def helper_bool_to_yesno(value) -> str:
    return "yes" if value else "no"


# ---------------------------------------------------------------------------
# result resolution


def resolve_nav_result(raw, trace: ExecutionTrace, ctx: ExecutionContext) -> NavResult:
    """Normalize a program's return value into the NavResult contract."""
    if isinstance(raw, PatchValue):
        frame = raw.frame if raw.frame != "merged" else None
        trace.notes.append("result: bare patch return normalized")
        return NavResult(
            function="navigate_to_object",
            inputs=(raw.horizontal_center, raw.vertical_center),
            box=raw.bounds,
            frame=frame,
            normalized=True,
        )
    if isinstance(raw, dict):
        if "function" not in raw:
            return error_result("malformed result")
        function = raw["function"]
        if function is None or function == "None":
            error = raw.get("error")
            return error_result(str(error) if error is not None else "unspecified error")
        inputs = raw.get("inputs")
        box = raw.get("box")
        if inputs is not None:
            if not (
                isinstance(inputs, (tuple, list))
                and len(inputs) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in inputs)
            ):
                return error_result("malformed result")
            inputs = (float(inputs[0]), float(inputs[1]))
        if box is not None:
            if not (
                isinstance(box, (tuple, list))
                and len(box) == 4
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in box)
            ):
                return error_result("malformed result")
            box = tuple(float(v) for v in box)
        if inputs is None and box is not None:
            inputs = ((box[0] + box[2]) / 2, (box[1] + box[3]) / 2)
        if inputs is None:
            return error_result("malformed result")
        if box is None:
            match = _registry_patch_by_center(ctx, inputs)
            box = match[0] if match else (inputs[0], inputs[1], inputs[0], inputs[1])
        if not (box[0] <= inputs[0] <= box[2] and box[1] <= inputs[1] <= box[3]):
            return error_result("malformed result")
        frame = _resolve_frame(ctx, box, inputs)
        return NavResult(
            function="navigate_to_object", inputs=inputs, box=box, frame=frame
        )
    return error_result("malformed result")


def _registry_entries(ctx: ExecutionContext) -> list[tuple[tuple[float, float, float, float], str]]:
    return [
        (tuple(entry["box"]), entry["frame"]) for entry in ctx.trace.patch_registry
    ]


def _frame_rank(frame: str) -> int:
    return FRAME_PRECEDENCE.get(frame, 9)


def _registry_patch_by_center(ctx, inputs) -> tuple[tuple[float, float, float, float], str] | None:
    matches = [
        (box, frame)
        for box, frame in _registry_entries(ctx)
        if (box[0] + box[2]) / 2 == inputs[0] and (box[1] + box[3]) / 2 == inputs[1]
    ]
    if not matches:
        return None
    matches.sort(key=lambda item: _frame_rank(item[1]))
    return matches[0]


def _resolve_frame(ctx: ExecutionContext, box, inputs) -> str | None:
    exact = [frame for b, frame in _registry_entries(ctx) if b == tuple(box)]
    if exact:
        return min(exact, key=_frame_rank)
    by_center = _registry_patch_by_center(ctx, inputs)
    if by_center is not None:
        return by_center[1]
    if ctx.mode == "A":
        return "panorama"
    return None


# ---------------------------------------------------------------------------
# the interpreter


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


class _BreakSignal(Exception):
    pass


class _ContinueSignal(Exception):
    pass


class Interpreter:
    def __init__(self, ctx: ExecutionContext, budget: int = DEFAULT_STEP_BUDGET):
        self.ctx = ctx
        self.budget = budget
        self.trace = ctx.trace

    # one tick per visited node keeps pathological programs bounded
    def _tick(self) -> None:
        self.trace.steps_used += 1
        if self.trace.steps_used > self.budget:
            raise NavRuntimeError(f"step budget exhausted ({self.budget} steps)")

    def run(self, nav_ast: NavAst):
        func = nav_ast.func
        env: dict[str, object] = {func.args.args[0].arg: RootImageValue(self.ctx)}
        try:
            for stmt in func.body:
                self._exec(stmt, env)
        except _ReturnSignal as signal:
            return signal.value
        return None

    # -- statements ---------------------------------------------------------

    def _exec(self, stmt: ast.stmt, env: dict) -> None:
        self._tick()
        if isinstance(stmt, ast.Assign):
            value = self._eval(stmt.value, env)
            self._bind(stmt.targets[0], value, env)
        elif isinstance(stmt, ast.Expr):
            self._eval(stmt.value, env)
        elif isinstance(stmt, ast.Return):
            value = self._eval(stmt.value, env) if stmt.value is not None else None
            raise _ReturnSignal(value)
        elif isinstance(stmt, ast.If):
            branch = stmt.body if self._truth(self._eval(stmt.test, env)) else stmt.orelse
            for child in branch:
                self._exec(child, env)
        elif isinstance(stmt, ast.For):
            iterable = self._eval(stmt.iter, env)
            if not isinstance(iterable, (list, tuple, str)):
                raise NavRuntimeError(
                    f"for loop requires a sequence, got {type(iterable).__name__}"
                )
            for item in list(iterable):
                self._tick()
                self._bind(stmt.target, item, env)
                try:
                    for child in stmt.body:
                        self._exec(child, env)
                except _BreakSignal:
                    break
                except _ContinueSignal:
                    continue
        elif isinstance(stmt, ast.Break):
            raise _BreakSignal()
        elif isinstance(stmt, ast.Continue):
            raise _ContinueSignal()
        elif isinstance(stmt, ast.Pass):
            pass
        else:  # pragma: no cover - parser guarantees the closed set
            raise NavRuntimeError(f"unsupported statement {type(stmt).__name__}")

    def _bind(self, target: ast.expr, value, env: dict) -> None:
        if isinstance(target, ast.Name):
            env[target.id] = value
            return
        if isinstance(target, ast.Tuple):
            if not isinstance(value, (list, tuple)):
                raise NavRuntimeError("cannot unpack a non-sequence")
            if len(value) != len(target.elts):
                raise NavRuntimeError(
                    f"unpack mismatch: {len(target.elts)} names, {len(value)} values"
                )
            for elt, item in zip(target.elts, value):
                env[elt.id] = item  # parser guarantees Name elements
            return
        raise NavRuntimeError("unsupported assignment target")

    @staticmethod
    def _truth(value) -> bool:
        if isinstance(value, PatchValue):
            return True
        return bool(value)

    # -- expressions ----------------------------------------------------------

    def _eval(self, expr: ast.expr, env: dict):
        self._tick()
        if isinstance(expr, ast.Constant):
            return expr.value
        if isinstance(expr, ast.Name):
            if expr.id in env:
                return env[expr.id]
            return _GlobalFunction(expr.id)
        if isinstance(expr, ast.Attribute):
            return self._attribute(expr, env)
        if isinstance(expr, ast.Call):
            return self._call(expr, env)
        if isinstance(expr, ast.Subscript):
            return self._subscript(expr, env)
        if isinstance(expr, ast.Compare):
            return self._compare(expr, env)
        if isinstance(expr, ast.BoolOp):
            return self._boolop(expr, env)
        if isinstance(expr, ast.BinOp):
            return self._binop(expr, env)
        if isinstance(expr, ast.UnaryOp):
            return self._unaryop(expr, env)
        if isinstance(expr, ast.List):
            items = [self._eval(e, env) for e in expr.elts]
            self._cap_sequence(items)
            return items
        if isinstance(expr, ast.Tuple):
            return tuple(self._eval(e, env) for e in expr.elts)
        if isinstance(expr, ast.Dict):
            return {
                key.value: self._eval(value, env)
                for key, value in zip(expr.keys, expr.values)
            }
        if isinstance(expr, ast.Lambda):
            return _KeyFunction(expr, dict(env), self)
        raise NavRuntimeError(f"unsupported expression {type(expr).__name__}")

    @staticmethod
    def _cap_sequence(seq) -> None:
        if len(seq) > SEQUENCE_CAP:
            raise NavRuntimeError(f"sequence length cap exceeded ({SEQUENCE_CAP})")

    def _attribute(self, expr: ast.Attribute, env: dict):
        receiver = self._eval(expr.value, env)
        name = expr.attr
        if isinstance(receiver, PatchValue):
            if name in (
                "left",
                "lower",
                "right",
                "upper",
                "width",
                "height",
                "horizontal_center",
                "vertical_center",
                "frame",
            ):
                return getattr(receiver, name)
            raise NavRuntimeError(f"patch has no attribute {name!r}")
        raise NavRuntimeError(
            f"attribute access on {type(receiver).__name__} is not allowed"
        )

    def _subscript(self, expr: ast.Subscript, env: dict):
        container = self._eval(expr.value, env)
        index = self._eval(expr.slice, env)
        if isinstance(container, dict):
            if not isinstance(index, str):
                raise NavRuntimeError("mapping keys are strings")
            if index not in container:
                raise NavRuntimeError(f"missing mapping key {index!r}")
            return container[index]
        if isinstance(container, (list, tuple, str)):
            if isinstance(index, bool) or not isinstance(index, int):
                raise NavRuntimeError("sequence index must be an integer")
            try:
                return container[index]
            except IndexError:
                raise NavRuntimeError(
                    f"index {index} out of range (length {len(container)})"
                ) from None
        raise NavRuntimeError(f"cannot index a {type(container).__name__}")

    def _compare(self, expr: ast.Compare, env: dict) -> bool:
        left = self._eval(expr.left, env)
        for op, rhs_node in zip(expr.ops, expr.comparators):
            right = self._eval(rhs_node, env)
            try:
                if isinstance(op, ast.Eq):
                    ok = left == right
                elif isinstance(op, ast.NotEq):
                    ok = left != right
                elif isinstance(op, ast.Lt):
                    ok = left < right
                elif isinstance(op, ast.LtE):
                    ok = left <= right
                elif isinstance(op, ast.Gt):
                    ok = left > right
                elif isinstance(op, ast.GtE):
                    ok = left >= right
                elif isinstance(op, ast.In):
                    ok = left in right
                elif isinstance(op, ast.NotIn):
                    ok = left not in right
                else:  # pragma: no cover
                    raise NavRuntimeError("unsupported comparison")
            except TypeError as exc:
                raise NavRuntimeError(f"bad comparison: {exc}") from exc
            if not ok:
                return False
            left = right
        return True

    def _boolop(self, expr: ast.BoolOp, env: dict):
        is_and = isinstance(expr.op, ast.And)
        result = None
        for node in expr.values:
            result = self._eval(node, env)
            truthy = self._truth(result)
            if is_and and not truthy:
                return result
            if not is_and and truthy:
                return result
        return result

    def _binop(self, expr: ast.BinOp, env: dict):
        left = self._eval(expr.left, env)
        right = self._eval(expr.right, env)
        op = expr.op
        try:
            if isinstance(op, ast.Add):
                if isinstance(left, list) and isinstance(right, list):
                    combined = left + right
                    self._cap_sequence(combined)
                    return combined
                return left + right
            if isinstance(op, ast.Sub):
                return left - right
            if isinstance(op, ast.Mult):
                return left * right
            if isinstance(op, ast.Div):
                return left / right
            if isinstance(op, ast.FloorDiv):
                return left // right
            if isinstance(op, ast.Mod):
                return left % right
        except TypeError as exc:
            raise NavRuntimeError(f"bad arithmetic: {exc}") from exc
        except ZeroDivisionError:
            raise NavRuntimeError("division by zero") from None
        raise NavRuntimeError("unsupported operator")  # pragma: no cover

    def _unaryop(self, expr: ast.UnaryOp, env: dict):
        value = self._eval(expr.operand, env)
        if isinstance(expr.op, ast.USub):
            try:
                return -value
            except TypeError as exc:
                raise NavRuntimeError(f"bad negation: {exc}") from exc
        if isinstance(expr.op, ast.UAdd):
            return value
        return not self._truth(value)

    # -- calls ------------------------------------------------------------

    def _call(self, expr: ast.Call, env: dict):
        args = [self._eval(a, env) for a in expr.args]
        kwargs = {kw.arg: self._eval(kw.value, env) for kw in expr.keywords}
        func = expr.func
        if isinstance(func, ast.Name):
            target = env.get(func.id, _GlobalFunction(func.id))
            if isinstance(target, _GlobalFunction):
                return self._call_global(target.name, args, kwargs)
            raise NavRuntimeError(f"{func.id!r} is not callable")
        receiver = self._eval(func.value, env)
        return self._call_method(receiver, func.attr, args, kwargs)

    def _call_method(self, receiver, name: str, args: list, kwargs: dict):
        if isinstance(receiver, list):
            if name == "sort":
                if args:
                    raise NavRuntimeError("sort takes only a key argument")
                key = kwargs.pop("key", None)
                if kwargs:
                    raise NavRuntimeError("sort: unsupported keyword arguments")
                self._sort_in_place(receiver, key)
                return None
            if name == "append":
                if len(args) != 1 or kwargs:
                    raise NavRuntimeError("append takes exactly one argument")
                receiver.append(args[0])
                self._cap_sequence(receiver)
                return None
            raise NavRuntimeError(f"list has no method {name!r}")
        if isinstance(receiver, PatchValue):
            return self._call_patch_method(receiver, name, args, kwargs)
        raise NavRuntimeError(f"cannot call {name!r} on {type(receiver).__name__}")

    def _call_patch_method(self, patch: PatchValue, name: str, args: list, kwargs: dict):
        if name == "find":
            self._need(args, kwargs, 1)
            if not isinstance(args[0], str):
                raise NavRuntimeError("find: object name must be a string")
            return patch_find(patch, args[0])
        if name == "exists":
            self._need(args, kwargs, 1)
            if not isinstance(args[0], str):
                raise NavRuntimeError("exists: object name must be a string")
            return patch_exists(patch, args[0])
        if name == "verify_property":
            self._need(args, kwargs, 2)
            if not all(isinstance(a, str) for a in args):
                raise NavRuntimeError("verify_property: arguments must be strings")
            return patch_verify_property(patch, args[0], args[1])
        if name == "best_text_match":
            self._need(args, kwargs, 1)
            if not isinstance(args[0], list):
                raise NavRuntimeError("best_text_match: options must be a list")
            return patch_best_text_match(patch, args[0])
        if name == "simple_query":
            question = None
            if args:
                if len(args) > 1:
                    raise NavRuntimeError("simple_query takes at most one argument")
                question = args[0]
            elif "question" in kwargs:
                question = kwargs.pop("question")
            if kwargs:
                raise NavRuntimeError("simple_query: unsupported keyword arguments")
            return patch_simple_query(patch, question)
        if name == "compute_depth":
            self._need(args, kwargs, 0)
            return patch_compute_depth(patch)
        if name == "crop":
            self._need(args, kwargs, 4)
            return patch_crop(patch, *args)
        if name == "overlaps_with":
            self._need(args, kwargs, 4)
            return patch_overlaps_with(patch, *args)
        raise NavRuntimeError(f"patch has no method {name!r}")

    @staticmethod
    def _need(args: list, kwargs: dict, count: int) -> None:
        if len(args) != count or kwargs:
            raise NavRuntimeError(f"expected {count} positional argument(s)")

    def _call_global(self, name: str, args: list, kwargs: dict):
        if name == "ImagePatch":
            return self._construct_patch(args, kwargs)
        if name == "navigate_to_object":
            if len(args) != 2 or kwargs:
                raise NavRuntimeError("navigate_to_object takes (x, y)")
            x, y = args
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (x, y)):
                raise NavRuntimeError("navigate_to_object: coordinates must be numbers")
            self.trace.record_call("navigate_to_object", f"({x}, {y})", "nav request")
            return {"function": "navigate_to_object", "inputs": (float(x), float(y))}
        if name == "best_image_match":
            patches = args[0] if args else kwargs.get("list_patches")
            content = args[1] if len(args) > 1 else kwargs.get("content", [])
            return_index = kwargs.get("return_index", args[2] if len(args) > 2 else False)
            return helper_best_image_match(patches, content, bool(return_index))
        if name == "distance":
            if len(args) != 2 or kwargs:
                raise NavRuntimeError("distance takes two patches")
            return helper_distance(args[0], args[1])
        if name == "bool_to_yesno":
            if len(args) != 1 or kwargs:
                raise NavRuntimeError("bool_to_yesno takes one argument")
            result = helper_bool_to_yesno(args[0])
            self.trace.record_call("bool_to_yesno", _summ(args[0]), result)
            return result
        if name == "coerce_to_numeric":
            if len(args) != 1 or kwargs:
                raise NavRuntimeError("coerce_to_numeric takes one argument")
            result = helper_coerce_to_numeric(args[0])
            self.trace.record_call("coerce_to_numeric", _summ(args[0]), str(result))
            return result
        if name == "llm_query":
            question = args[0] if args else kwargs.get("question")
            if not isinstance(question, str):
                raise NavRuntimeError("llm_query: question must be a string")
            answer = self.ctx.qa_answer(None, question)
            if answer is None:
                self.trace.notes.append(f"llm_query: no fixture for {question!r}")
                answer = "no fixture"
            self.trace.record_call("llm_query", _summ(question), f"{_summ(answer)} [llm]")
            return answer
        if name == "len":
            if len(args) != 1 or kwargs:
                raise NavRuntimeError("len takes one argument")
            value = args[0]
            if isinstance(value, (list, tuple, str, dict)):
                return len(value)
            raise NavRuntimeError(f"len of {type(value).__name__} is not defined")
        if name == "sorted":
            if len(args) != 1:
                raise NavRuntimeError("sorted takes one sequence")
            seq = args[0]
            if not isinstance(seq, (list, tuple)):
                raise NavRuntimeError("sorted requires a sequence")
            out = list(seq)
            key = kwargs.pop("key", None)
            if kwargs:
                raise NavRuntimeError("sorted: unsupported keyword arguments")
            self._sort_in_place(out, key)
            return out
        if name in ("min", "max"):
            return self._min_max(name, args, kwargs)
        if name == "abs":
            if len(args) != 1 or not isinstance(args[0], (int, float)):
                raise NavRuntimeError("abs takes one number")
            return abs(args[0])
        if name == "enumerate":
            if len(args) != 1 or kwargs or not isinstance(args[0], (list, tuple)):
                raise NavRuntimeError("enumerate takes one sequence")
            return [(i, v) for i, v in enumerate(args[0])]
        if name == "range":
            if kwargs or not args or len(args) > 3:
                raise NavRuntimeError("range takes one to three integers")
            for a in args:
                if isinstance(a, bool) or not isinstance(a, int):
                    raise NavRuntimeError("range arguments must be integers")
            try:
                out = list(range(*args))
            except ValueError as exc:
                raise NavRuntimeError(f"range: {exc}") from exc
            self._cap_sequence(out)
            return out
        raise NavRuntimeError(f"unknown function {name!r}")

    def _construct_patch(self, args: list, kwargs: dict):
        if kwargs:
            raise NavRuntimeError("ImagePatch: unsupported keyword arguments")
        if not args:
            raise NavRuntimeError("ImagePatch requires the image argument")
        base = args[0]
        rest = args[1:]
        if isinstance(base, RootImageValue):
            parent = self.ctx.root_patch()
        elif isinstance(base, PatchValue):
            parent = base
        else:
            raise NavRuntimeError("ImagePatch: first argument must be the image or a patch")
        if not rest:
            return parent
        if len(rest) != 4:
            raise NavRuntimeError("ImagePatch takes (image, left, lower, right, upper)")
        return patch_crop(parent, *rest)

    def _sort_in_place(self, seq: list, key) -> None:
        def sort_key(item):
            if key is None:
                return item
            return self._apply_key(key, item)

        try:
            decorated = [(sort_key(item), idx) for idx, item in enumerate(seq)]
            decorated.sort(key=lambda pair: pair[0])
        except TypeError as exc:
            raise NavRuntimeError(f"cannot sort: {exc}") from exc
        seq[:] = [seq[idx] for _key, idx in decorated]

    def _apply_key(self, key, item):
        if isinstance(key, _KeyFunction):
            return key(item)
        raise NavRuntimeError("key must be a lambda")

    def _min_max(self, name: str, args: list, kwargs: dict):
        key = kwargs.pop("key", None)
        if kwargs:
            raise NavRuntimeError(f"{name}: unsupported keyword arguments")
        if len(args) == 1:
            seq = args[0]
            if not isinstance(seq, (list, tuple)):
                raise NavRuntimeError(f"{name} of a non-sequence")
            if not seq:
                raise NavRuntimeError(f"{name} of an empty sequence")
            values = list(seq)
        elif len(args) >= 2:
            values = args
        else:
            raise NavRuntimeError(f"{name} needs arguments")
        try:
            if key is None:
                return min(values) if name == "min" else max(values)
            keyed = [(self._apply_key(key, v), i, v) for i, v in enumerate(values)]
            chosen = min(keyed, key=lambda t: t[0]) if name == "min" else max(
                keyed, key=lambda t: t[0]
            )
            return chosen[2]
        except TypeError as exc:
            raise NavRuntimeError(f"bad comparison in {name}: {exc}") from exc


class _GlobalFunction:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class _KeyFunction:
    """Single-parameter lambda closing over the defining environment."""

    __slots__ = ("node", "env", "interp")

    def __init__(self, node: ast.Lambda, env: dict, interp: Interpreter):
        self.node = node
        self.env = env
        self.interp = interp

    def __call__(self, item):
        local = dict(self.env)
        local[self.node.args.args[0].arg] = item
        return self.interp._eval(self.node.body, local)


def execute_program(
    nav_ast: NavAst,
    views: ViewSet,
    mode: str,
    budget: int = DEFAULT_STEP_BUDGET,
    qa_fixtures=None,
    seed: int = 0,
) -> tuple[NavResult, ExecutionTrace]:
    """Run a validated program and normalize its result.

    Runtime failures (budget exhaustion, type errors, bad indexing) become
    NavResult{function: "None", error: ...}; the trace is returned either way.
    """
    ctx = ExecutionContext(views, mode, seed=seed, qa_fixtures=qa_fixtures)
    interp = Interpreter(ctx, budget=budget)
    try:
        raw = interp.run(nav_ast)
    except NavRuntimeError as exc:
        return error_result(str(exc)), ctx.trace
    return resolve_nav_result(raw, ctx.trace, ctx), ctx.trace
