"""Independent reference implementations used by the tests."""


def is_word_char(ch):
    return ch.isalnum() or ch == "_"


def at_boundary(s, i):
    left = i > 0 and is_word_char(s[i - 1])
    right = i < len(s) and is_word_char(s[i])
    return left != right


def _upper(c):
    return "A" <= c <= "Z"


def _letter_or_hyphen(c):
    return c == "-" or "a" <= c.lower() <= "z"


def is_candidate(s, i, j):
    """Identification predicate for s[i:j], written without regular expressions."""
    sub = s[i:j]
    if len(sub) < 2 or not (at_boundary(s, i) and at_boundary(s, j)):
        return False
    core = sub[:-1] if sub[-1] == "s" and len(sub) >= 3 and _upper(sub[-2]) else sub
    if len(core) < 2 or not (_upper(core[0]) and _upper(core[-1])):
        return False
    return all(_letter_or_hyphen(c) for c in core[1:-1])


def scan_oracle(s):
    """Leftmost-longest non-overlapping matches, testing every substring.

    Substrings that contain a character other than a letter or hyphen can
    never qualify, so for each start the end only ranges over the run of
    such characters; every substring inside the run is still tested.
    """
    out, pos, n = [], 0, len(s)
    while pos < n:
        found = None
        for i in range(pos, n):
            run_end = i
            while run_end < n and _letter_or_hyphen(s[run_end]):
                run_end += 1
            ends = [j for j in range(i + 2, run_end + 1) if is_candidate(s, i, j)]
            if ends:
                found = (i, max(ends))
                break
        if found is None:
            break
        out.append((s[found[0]:found[1]], found[0]))
        pos = found[1]
    return out
