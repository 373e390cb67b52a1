"""Read and write the plain-text problem file format.

A problem file has one `key = value` assignment per line. Blank lines and
lines starting with `#` are ignored. Expressions may be quoted with `"` or
`'`.

```
# u_t + u*u_x = exp(u)
f = "exp(u)"
g = "u"
h = "s"
u_domain = [-5, 5]
param.a = 1
```

Keys `f`, `g` and `h` are required. The optional keys are `param.<name>`,
`u_domain`, `s_domain`, `tol`, `quad_tol`, `n_scan`, `u_ref`, `phi_ref`,
`v_ref` and `ell_ref`. Unknown or repeated keys are errors.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from os import PathLike
from pathlib import Path
from typing import Final, Union

from burgerquad._errors import BurgerQuadError, ProblemFileError
from burgerquad._interval import Interval
from burgerquad.constants import N_SCAN, QUAD_TOL, ROOT_TOL
from burgerquad.expr import Expr, format_number, parse
from burgerquad.solver import Problem

logger = logging.getLogger(__name__)

ASSIGNMENT_PATTERN: Final = re.compile(
    r"^\s*(?P<key>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)?)"
    r"\s*=\s*(?P<value>.*?)\s*$"
)
QUOTED_PATTERN: Final = re.compile(r"""^(?P<q>["'])(?P<body>.*)(?P=q)$""")

EXPRESSION_KEYS: Final = {"f": "u", "g": "u", "h": "s"}

StrPath = Union[str, "PathLike[str]"]


@dataclass(frozen=True)
class _Line:
    number: int
    text: str

    def error(self, message: str) -> ProblemFileError:
        return ProblemFileError(
            f"line {self.number}: {message}", line_number=self.number, line=self.text
        )


def _unquote(value: str) -> str:
    match = QUOTED_PATTERN.match(value)
    return match.group("body") if match else value


def _real(value: str) -> float:
    return float(_unquote(value))


def _count(value: str) -> int:
    return int(_unquote(value))


def _interval(value: str) -> Interval:
    return Interval.parse(_unquote(value))


_SCALAR_KEYS: Final[Mapping[str, tuple[str, Callable[[str], object]]]] = {
    "u_domain": ("u_domain", _interval),
    "s_domain": ("s_domain", _interval),
    "tol": ("tol", _real),
    "quad_tol": ("quad_tol", _real),
    "n_scan": ("n_scan", _count),
    "u_ref": ("u_ref", _real),
    "phi_ref": ("phi_at_ref", _real),
    "v_ref": ("v_ref", _real),
    "ell_ref": ("ell_at_ref", _real),
}


def loads(text: str) -> Problem:
    """Parse problem-file text into a `Problem`.

    Raises
    ------
    ProblemFileError
        With the 1-based `line_number` of the offending line (0 when a
        required key is missing altogether).

    Examples
    --------
    >>> p = loads('f = "0"\\ng = "u"\\nh = "(a*s + b)/c"\\nparam.a = 1\\n'
    ...           'param.b = 0\\nparam.c = 1')
    >>> str(p.h), dict(p.params)
    ('(a*s + b)/c', {'a': 1.0, 'b': 0.0, 'c': 1.0})
    """
    expressions: dict[str, tuple[Expr, _Line]] = {}
    params: dict[str, float] = {}
    options: dict[str, object] = {}
    seen: set[str] = set()

    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        line = _Line(number, raw)
        match = ASSIGNMENT_PATTERN.match(raw)
        if not match:
            raise line.error("expected 'key = value'")
        key, value = match.group("key"), match.group("value")
        if key in seen:
            raise line.error(f"{key!r} is assigned more than once")
        seen.add(key)
        if not value:
            raise line.error(f"{key!r} has no value")

        if key in EXPRESSION_KEYS:
            try:
                expressions[key] = (parse(_unquote(value)), line)
            except BurgerQuadError as e:
                raise line.error(f"{key} is not a valid expression: {e}") from e
        elif key.startswith("param."):
            name = key.partition(".")[2]
            try:
                params[name] = _real(value)
            except ValueError:
                raise line.error(f"{key} must be a real number") from None
        elif key in _SCALAR_KEYS:
            field_name, convert = _SCALAR_KEYS[key]
            try:
                options[field_name] = convert(value)
            except ValueError as e:
                raise line.error(f"invalid value for {key}: {e}") from None
        else:
            raise line.error(f"unknown key {key!r}")

    missing = [k for k in EXPRESSION_KEYS if k not in expressions]
    if missing:
        raise ProblemFileError(
            f"missing required key(s): {', '.join(missing)}", line_number=0, line=""
        )

    for key, variable in EXPRESSION_KEYS.items():
        expr, line = expressions[key]
        unbound = sorted(expr.free_names - {variable} - params.keys())
        if unbound:
            raise line.error(
                f"{key} uses {unbound[0]!r}, which is neither {variable!r} "
                "nor a declared param"
            )

    try:
        problem = Problem(
            expressions["f"][0],
            expressions["g"][0],
            expressions["h"][0],
            params=params,
            **options,  # type: ignore[arg-type]
        )
    except ValueError as e:
        raise ProblemFileError(str(e), line_number=0, line="") from e
    logger.debug("Loaded problem %s", problem)
    return problem


def load(path: StrPath) -> Problem:
    """Read a problem file from disk."""
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(problem: Problem) -> str:
    """Write a `Problem` in the problem-file format.

    Only settings that differ from the defaults are written.

    >>> print(dumps(Problem.of("exp(u)", "u", "s", u_domain=Interval(-5, 5))))
    f = "exp(u)"
    g = "u"
    h = "s"
    u_domain = [-5, 5]
    <BLANKLINE>
    """
    lines = [f'{key} = "{getattr(problem, key)}"' for key in EXPRESSION_KEYS]
    lines.extend(
        f"param.{name} = {format_number(value)}"
        for name, value in sorted(problem.params.items())
    )
    for name in ("u_domain", "s_domain"):
        domain: Interval | None = getattr(problem, name)
        if domain is not None:
            lines.append(
                f"{name} = [{format_number(domain.lo)}, {format_number(domain.hi)}]"
            )
    defaults: Mapping[str, object] = {
        "tol": ROOT_TOL,
        "quad_tol": QUAD_TOL,
        "n_scan": N_SCAN,
        "u_ref": None,
        "phi_ref": 0.0,
        "v_ref": None,
        "ell_ref": 0.0,
    }
    for key, default in defaults.items():
        value = getattr(problem, _SCALAR_KEYS[key][0])
        if value is None or value == default:
            continue
        text = str(value) if isinstance(value, int) else format_number(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def dump(problem: Problem, path: StrPath) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(problem))
