#!/usr/bin/env python3
"""Regenerates core/src/unicode_data.cpp from the Python unicodedata module.

The emitted tables drive NFC normalization (full canonical decomposition,
combining classes, primary composites) and tokenizer character classes
(punctuation ranges, Latin simple-lowercase map). Hangul syllables are
handled algorithmically at runtime and are excluded here.

Usage: python3 tools/gen_unicode_tables.py > core/src/unicode_data.cpp
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_BASE, HANGUL_END = 0xAC00, 0xD7A3


def code_points():
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        yield cp


def nfd_table():
    """cp -> fully (recursively) decomposed canonical sequence."""
    out = []
    for cp in code_points():
        if HANGUL_BASE <= cp <= HANGUL_END:
            continue
        seq = [ord(c) for c in unicodedata.normalize("NFD", chr(cp))]
        if seq != [cp]:
            out.append((cp, seq))
    return out


def composition_pairs():
    """(a, b) -> composed, for primary composites only."""
    pairs = []
    for cp in code_points():
        if HANGUL_BASE <= cp <= HANGUL_END:
            continue
        d = unicodedata.decomposition(chr(cp))
        if not d or d.startswith("<"):
            continue
        parts = [int(p, 16) for p in d.split()]
        if len(parts) != 2:
            continue
        a, b = parts
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            pairs.append((a, b, cp))
    pairs.sort()
    return pairs


def ccc_ranges():
    ranges = []
    for cp in code_points():
        c = unicodedata.combining(chr(cp))
        if c == 0:
            continue
        if ranges and ranges[-1][1] == cp - 1 and ranges[-1][2] == c:
            ranges[-1] = (ranges[-1][0], cp, c)
        else:
            ranges.append((cp, cp, c))
    return ranges


def punct_ranges():
    ranges = []
    for cp in code_points():
        if unicodedata.category(chr(cp)).startswith("P"):
            if ranges and ranges[-1][1] == cp - 1:
                ranges[-1] = (ranges[-1][0], cp)
            else:
                ranges.append((cp, cp))
    return ranges


def latin_lower_map():
    out = []
    for cp in range(0x41, 0x250):
        low = chr(cp).lower()
        if len(low) == 1 and ord(low) != cp:
            out.append((cp, ord(low)))
    return out


def main():
    w = sys.stdout.write
    nfd = nfd_table()
    pool = []
    entries = []
    for cp, seq in nfd:
        entries.append((cp, len(pool), len(seq)))
        pool.extend(seq)
    comp = composition_pairs()
    ccc = ccc_ranges()
    punct = punct_ranges()
    lower = latin_lower_map()

    w("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
      % unicodedata.unidata_version)
    w('#include "unicode_data.hpp"\n\n')
    w("namespace fnd::unicode_data {\n\n")

    w("const DecompEntry kNfdEntries[] = {\n")
    for cp, off, n in entries:
        w("  {0x%X,%d,%d},\n" % (cp, off, n))
    w("};\nconst std::size_t kNfdEntryCount = %d;\n\n" % len(entries))

    w("const char32_t kNfdPool[] = {\n")
    for i in range(0, len(pool), 12):
        w("  " + ",".join("0x%X" % v for v in pool[i:i + 12]) + ",\n")
    w("};\n\n")

    w("const CompEntry kCompPairs[] = {\n")
    for a, b, c in comp:
        w("  {0x%X,0x%X,0x%X},\n" % (a, b, c))
    w("};\nconst std::size_t kCompPairCount = %d;\n\n" % len(comp))

    w("const CccRange kCccRanges[] = {\n")
    for lo, hi, c in ccc:
        w("  {0x%X,0x%X,%d},\n" % (lo, hi, c))
    w("};\nconst std::size_t kCccRangeCount = %d;\n\n" % len(ccc))

    w("const CpRange kPunctRanges[] = {\n")
    for lo, hi in punct:
        w("  {0x%X,0x%X},\n" % (lo, hi))
    w("};\nconst std::size_t kPunctRangeCount = %d;\n\n" % len(punct))

    w("const CaseEntry kLatinLower[] = {\n")
    for cp, low in lower:
        w("  {0x%X,0x%X},\n" % (cp, low))
    w("};\nconst std::size_t kLatinLowerCount = %d;\n\n" % len(lower))

    w("}  // namespace fnd::unicode_data\n")


if __name__ == "__main__":
    main()
