"""Free group words over {a, b} as strings: upper case = inverse letter."""

from __future__ import annotations


def invert_letter(ch: str) -> str:
    return ch.lower() if ch.isupper() else ch.upper()


def inverse(word: str) -> str:
    return "".join(invert_letter(ch) for ch in reversed(word))


def reduce_word(word: str) -> str:
    out: list[str] = []
    for ch in word:
        if out and out[-1] == invert_letter(ch):
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def concat(*words: str) -> str:
    return reduce_word("".join(words))


def conjugate(word: str, by: str) -> str:
    """by * word * by^-1."""
    return concat(by, word, inverse(by))


def cyclic_reduce(word: str) -> str:
    w = reduce_word(word)
    while len(w) >= 2 and w[0] == invert_letter(w[-1]):
        w = w[1:-1]
    return w


def cyclic_rotations(word: str) -> set[str]:
    return {word[i:] + word[:i] for i in range(max(len(word), 1))}


def are_conjugate(w1: str, w2: str) -> bool:
    """Conjugacy test in the free group: equal cyclic reductions up to
    rotation."""
    c1, c2 = cyclic_reduce(w1), cyclic_reduce(w2)
    if len(c1) != len(c2):
        return False
    return c2 in cyclic_rotations(c1)


def abelianization(word: str) -> tuple[int, int]:
    p = word.count("a") - word.count("A")
    q = word.count("b") - word.count("B")
    return p, q


def reduced_words(max_len: int, letters: str = "aAbB"):
    """All nonempty freely reduced words of length <= max_len, shortest
    first, lexicographic within a length."""
    frontier = [""]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for ch in letters:
                if w and w[-1] == invert_letter(ch):
                    continue
                nxt.append(w + ch)
        for w in nxt:
            yield w
        frontier = nxt
