"""Words over a generator alphabet with formal inverses.

A letter is ``(name, exp)`` with ``exp`` in ``{1, -1}``; a word is a tuple of
letters.  Text form is whitespace/``*``-separated tokens ``name`` or
``name^k``; ``1`` and the empty string denote the empty word.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence, Union

from .errors import ParseError

Letter = tuple[str, int]
Word = tuple[Letter, ...]
WordLike = Union[str, Sequence[Letter], Sequence[str]]

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_.']*)(?:\^(-?\d+))?$")


def parse_word(text: WordLike) -> Word:
    """Parse a word from text, a list of tokens, or a sequence of letters."""
    if isinstance(text, tuple) and all(isinstance(x, tuple) for x in text):
        return tuple((str(g), int(e)) for g, e in text)
    if isinstance(text, str):
        tokens = [t for t in re.split(r"[\s*]+", text.strip()) if t]
    else:
        tokens = []
        for item in text:
            if isinstance(item, (list, tuple)) and len(item) == 2:
                tokens.append(f"{item[0]}^{int(item[1])}")
            else:
                tokens.append(str(item))
    out: list[Letter] = []
    for tok in tokens:
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if m is None:
            raise ParseError(f"malformed word token {tok!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        sign = 1 if exp > 0 else -1
        out.extend([(name, sign)] * abs(exp))
    return tuple(out)


def format_word(word: Iterable[Letter]) -> str:
    """Inverse of :func:`parse_word`, collapsing runs into powers."""
    parts: list[str] = []
    run_name, run_exp = None, 0
    for name, exp in word:
        if name == run_name and (exp > 0) == (run_exp > 0):
            run_exp += exp
            continue
        if run_name is not None:
            parts.append(run_name if run_exp == 1 else f"{run_name}^{run_exp}")
        run_name, run_exp = name, exp
    if run_name is not None:
        parts.append(run_name if run_exp == 1 else f"{run_name}^{run_exp}")
    return "*".join(parts) if parts else "1"


def invert(word: Sequence[Letter]) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def free_reduce(word: Iterable[Letter]) -> Word:
    stack: list[Letter] = []
    for g, e in word:
        if stack and stack[-1][0] == g and stack[-1][1] == -e:
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


def cyclic_reduce(word: Iterable[Letter]) -> Word:
    w = list(free_reduce(word))
    i, j = 0, len(w) - 1
    while i < j and w[i][0] == w[j][0] and w[i][1] == -w[j][1]:
        i += 1
        j -= 1
    return tuple(w[i : j + 1])


def power(word: Sequence[Letter], k: int) -> Word:
    if k < 0:
        return tuple(invert(word)) * (-k)
    return tuple(word) * k


def exponent_sum(word: Iterable[Letter], name: str) -> int:
    return sum(e for g, e in word if g == name)
