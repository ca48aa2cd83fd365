#include "fnd/unicode.hpp"

#include <algorithm>
#include <array>

#include "unicode_data.hpp"

namespace fnd {
namespace {

using namespace unicode_data;

constexpr char32_t kReplacement = 0xFFFD;

// Hangul syllable composition constants (UAX #15 §3.12).
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

unsigned char combining_class(char32_t cp) {
  std::size_t lo = 0, hi = kCccRangeCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cp < kCccRanges[mid].lo)
      hi = mid;
    else if (cp > kCccRanges[mid].hi)
      lo = mid + 1;
    else
      return kCccRanges[mid].ccc;
  }
  return 0;
}

const DecompEntry* find_decomp(char32_t cp) {
  std::size_t lo = 0, hi = kNfdEntryCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (kNfdEntries[mid].cp < cp)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < kNfdEntryCount && kNfdEntries[lo].cp == cp) return &kNfdEntries[lo];
  return nullptr;
}

char32_t compose_pair(char32_t a, char32_t b) {
  // Hangul L+V and LV+T.
  if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount &&
      b >= kHangulVBase && b < kHangulVBase + kHangulVCount) {
    char32_t l = a - kHangulLBase, v = b - kHangulVBase;
    return kHangulSBase + (l * kHangulVCount + v) * kHangulTCount;
  }
  if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
      (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
      b < kHangulTBase + kHangulTCount) {
    return a + (b - kHangulTBase);
  }
  std::size_t lo = 0, hi = kCompPairCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    const CompEntry& e = kCompPairs[mid];
    if (e.first < a || (e.first == a && e.second < b))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < kCompPairCount && kCompPairs[lo].first == a &&
      kCompPairs[lo].second == b)
    return kCompPairs[lo].composed;
  return 0;
}

void decompose_into(char32_t cp, std::vector<char32_t>& out) {
  if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
    char32_t idx = cp - kHangulSBase;
    out.push_back(kHangulLBase + idx / kHangulNCount);
    out.push_back(kHangulVBase + (idx % kHangulNCount) / kHangulTCount);
    char32_t t = idx % kHangulTCount;
    if (t != 0) out.push_back(kHangulTBase + t);
    return;
  }
  if (const DecompEntry* e = find_decomp(cp)) {
    for (unsigned i = 0; i < e->length; ++i)
      out.push_back(kNfdPool[e->offset + i]);
    return;
  }
  out.push_back(cp);
}

// Canonical ordering: stable sort of nonzero-ccc runs by combining class.
void canonical_order(std::vector<char32_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    unsigned char cc = combining_class(v[i]);
    if (cc == 0) continue;
    std::size_t j = i;
    while (j > 0 && combining_class(v[j - 1]) > cc) {
      std::swap(v[j - 1], v[j]);
      --j;
    }
  }
}

std::vector<char32_t> compose(const std::vector<char32_t>& v) {
  std::vector<char32_t> out;
  out.reserve(v.size());
  std::size_t starter = std::string::npos;
  int prev_cc = -1;
  for (char32_t c : v) {
    int cc = combining_class(c);
    if (starter != std::string::npos) {
      bool adjacent = out.size() == starter + 1;
      bool blocked = !adjacent && (prev_cc == 0 || prev_cc >= cc);
      if (!blocked) {
        if (char32_t comp = compose_pair(out[starter], c)) {
          out[starter] = comp;
          continue;
        }
      }
    }
    if (cc == 0) starter = out.size();
    prev_cc = cc;
    out.push_back(c);
  }
  return out;
}

// ASCII and Ethiopic (the dominant scripts here) are NFC-stable and carry
// no combining marks, so most strings skip the full pipeline.
bool nfc_trivial(const std::vector<char32_t>& cps) {
  for (char32_t c : cps) {
    if (c < 0x80) continue;
    if (c >= 0x1200 && c < 0x1380) continue;
    return false;
  }
  return true;
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b = static_cast<unsigned char>(s[i]);
    if (b < 0x80) {
      out.push_back(b);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b & 0xE0) == 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      cp = b & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      unsigned char cb = static_cast<unsigned char>(s[i + k]);
      if ((cb & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cb & 0x3F);
    }
    static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) ||
        cp < kMinForLen[len]) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t c : cps) utf8_append(out, c);
  return out;
}

std::vector<char32_t> nfc(const std::vector<char32_t>& cps) {
  if (nfc_trivial(cps)) return cps;
  std::vector<char32_t> decomposed;
  decomposed.reserve(cps.size() * 2);
  for (char32_t c : cps) decompose_into(c, decomposed);
  canonical_order(decomposed);
  return compose(decomposed);
}

std::string nfc(std::string_view s) {
  std::vector<char32_t> cps = utf8_decode(s);
  if (nfc_trivial(cps)) return std::string(s);
  return utf8_encode(nfc(cps));
}

bool is_white_space(char32_t cp) {
  // Unicode White_Space property (small and stable, so inlined).
  switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punctuation(char32_t cp) {
  std::size_t lo = 0, hi = kPunctRangeCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cp < kPunctRanges[mid].lo)
      hi = mid;
    else if (cp > kPunctRanges[mid].hi)
      lo = mid + 1;
    else
      return true;
  }
  return false;
}

char32_t latin_to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0xC0 || cp >= 0x250) return cp;
  std::size_t lo = 0, hi = kLatinLowerCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (kLatinLower[mid].upper < cp)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < kLatinLowerCount && kLatinLower[lo].upper == cp)
    return kLatinLower[lo].lower;
  return cp;
}

}  // namespace fnd
