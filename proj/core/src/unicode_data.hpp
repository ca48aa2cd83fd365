#pragma once

#include <cstddef>

// Static Unicode tables generated by tools/gen_unicode_tables.py.
// Hangul syllables (U+AC00..U+D7A3) are not present; they are decomposed
// and composed algorithmically in unicode.cpp.

namespace fnd::unicode_data {

struct DecompEntry {
  char32_t cp;
  unsigned offset;  // into kNfdPool
  unsigned length;
};

struct CompEntry {
  char32_t first;
  char32_t second;
  char32_t composed;
};

struct CccRange {
  char32_t lo;
  char32_t hi;
  unsigned char ccc;
};

struct CpRange {
  char32_t lo;
  char32_t hi;
};

struct CaseEntry {
  char32_t upper;
  char32_t lower;
};

extern const DecompEntry kNfdEntries[];
extern const std::size_t kNfdEntryCount;
extern const char32_t kNfdPool[];
extern const CompEntry kCompPairs[];
extern const std::size_t kCompPairCount;
extern const CccRange kCccRanges[];
extern const std::size_t kCccRangeCount;
extern const CpRange kPunctRanges[];
extern const std::size_t kPunctRangeCount;
extern const CaseEntry kLatinLower[];
extern const std::size_t kLatinLowerCount;

}  // namespace fnd::unicode_data
