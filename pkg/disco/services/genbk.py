"""Synthetic string background knowledge for scaling studies.

Strings over the alphabet ``{1..n}`` up to length ``L`` become flat
constants: ``s_e`` is the empty string, ``s_1337`` a string over an alphabet
of at most nine symbols, and ``s_1_10_3`` one over a larger alphabet. The
relations are ``string/1``, ``head/2``, ``tail/2`` and ``append/3``.

For ``S = sum(n**k for k in 1..L)`` the fact count is
``3 * S + sum((k + 1) * n**k for k in 1..L)``: one string, head and tail fact
per nonempty string and one append fact per split of each nonempty string.
"""

import itertools
import logging
from pathlib import Path
from typing import Iterator, Sequence, TextIO, Tuple, Union

from disco.core.config import settings
from disco.core.exceptions import ContractViolation, ResourceGuardError

logger = logging.getLogger(__name__)

EMPTY = "s_e"


def count_facts(alphabet: int, max_length: int) -> int:
    """Number of facts :func:`generate_facts` emits."""
    _check_sizes(alphabet, max_length)
    strings = sum(alphabet**k for k in range(1, max_length + 1))
    splits = sum((k + 1) * alphabet**k for k in range(1, max_length + 1))
    return 3 * strings + splits


def _check_sizes(alphabet: int, max_length: int) -> None:
    if alphabet < 1:
        raise ContractViolation(f"alphabet size must be at least 1, got {alphabet}")
    if max_length < 1:
        raise ContractViolation(f"maximum length must be at least 1, got {max_length}")


def string_constant(symbols: Sequence[int], alphabet: int) -> str:
    """Constant naming a string of alphabet symbols."""
    if not symbols:
        return EMPTY
    if alphabet <= 9:
        return "s_" + "".join(str(s) for s in symbols)
    return "s_" + "_".join(str(s) for s in symbols)


def _strings(alphabet: int, max_length: int) -> Iterator[Tuple[int, ...]]:
    letters = range(1, alphabet + 1)
    for length in range(1, max_length + 1):
        yield from itertools.product(letters, repeat=length)


def generate_facts(alphabet: int, max_length: int) -> Iterator[str]:
    """Fact lines in a fixed order: string, head, tail, then append."""
    _check_sizes(alphabet, max_length)

    def name(symbols: Sequence[int]) -> str:
        return string_constant(symbols, alphabet)

    for s in _strings(alphabet, max_length):
        yield f"string({name(s)})."
    for s in _strings(alphabet, max_length):
        yield f"head({name(s)},{s[0]})."
    for s in _strings(alphabet, max_length):
        yield f"tail({name(s)},{name(s[1:])})."
    for s in _strings(alphabet, max_length):
        whole = name(s)
        for cut in range(len(s) + 1):
            yield f"append({name(s[:cut])},{name(s[cut:])},{whole})."


def write_facts(
    alphabet: int,
    max_length: int,
    output: Union[str, Path, TextIO],
    force: bool = False,
) -> int:
    """
    Write the synthetic facts, one per line.

    Args:
        alphabet: Alphabet size n
        max_length: Maximum string length L
        output: File path or open text stream
        force: Skip the size guard

    Returns:
        Number of facts written

    Raises:
        ContractViolation: For sizes below 1
        ResourceGuardError: When the output exceeds GENBK_MAX_FACTS without ``force``
    """
    expected = count_facts(alphabet, max_length)
    if expected > settings.GENBK_MAX_FACTS and not force:
        raise ResourceGuardError(
            f"{expected} facts exceed the limit of {settings.GENBK_MAX_FACTS}; "
            "use --force to generate them anyway"
        )

    logger.info(f"Generating {expected} facts for n={alphabet}, L={max_length}")
    if isinstance(output, (str, Path)):
        with open(output, "w", encoding="utf-8", newline="\n") as handle:
            written = _write(alphabet, max_length, handle)
    else:
        written = _write(alphabet, max_length, output)
    assert written == expected, f"wrote {written} facts, expected {expected}"
    return written


def _write(alphabet: int, max_length: int, handle: TextIO) -> int:
    written = 0
    for line in generate_facts(alphabet, max_length):
        handle.write(line)
        handle.write("\n")
        written += 1
    return written


def generate_text(alphabet: int, max_length: int) -> str:
    """All facts as one string."""
    return "\n".join(generate_facts(alphabet, max_length)) + "\n"
