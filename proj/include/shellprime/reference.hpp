#pragma once

// Published reference values reproduced by the toolkit. The `reproduce`
// subcommand and the acceptance suite compare freshly computed results
// against these and record the differences in manifests.

#include <array>
#include <cstdint>
#include <optional>

namespace shellprime::reference {

inline constexpr double kRootM = 1.68723;
inline constexpr double kRootUpper = 2.00000;
inline constexpr double kRootLower = 1.35759;
inline constexpr unsigned kDigitLimit = 128;

/// One row of the shell-prime count table: observed counts Pi and the
/// logarithmic-sum estimates Ms (root m = 1.68723) at x = 100 and x = 200.
/// Rows without published x = 200 entries carry -1 / nullptr.
struct CountRow {
  std::uint32_t p;
  int pi_100;
  const char* ms_100;
  int pi_200;           // -1 when not published
  const char* ms_200;   // nullptr when not published
};

inline constexpr std::array<CountRow, 18> kCountTable{{
    {2, 44, "42.75969", 76, "78.48273"},
    {3, 43, "29.01307", 72, "53.06455"},
    {5, 18, "19.71488", 32, "35.92022"},
    {7, 24, "15.71077", 40, "28.56513"},
    {11, 9, "11.77596", 12, "21.36330"},
    {13, 8, "10.61689", 20, "19.24779"},
    {17, 11, "9.00845", 17, "16.31698"},
    {19, 11, "8.42015", 17, "15.24648"},
    {23, 5, "7.50235", 8, "13.57796"},
    {29, 8, "6.52712", 8, "11.80714"},
    {31, 8, "6.27155", 13, "11.34343"},
    {37, 3, "5.64216", 5, "10.20206"},
    {41, 6, "5.30697", 12, "9.59457"},
    {43, 7, "5.15842", 14, "9.32540"},
    {47, 5, "4.89221", 9, "8.84316"},
    {53, 2, "4.55460", 6, "8.23180"},
    {59, 5, "4.27319", -1, nullptr},
    {61, 6, "4.18934", -1, nullptr},
}};

/// M-series values (S*P - 1 at s = 1) for the integer family and the first
/// four prime-shell powers, at truncations x = 100 and x = 200.
struct MValueRow {
  std::uint32_t p;  // 0 = integers family
  const char* m_100;
  const char* m_200;
};

inline constexpr std::array<MValueRow, 5> kMSeriesTable{{
    {0, "-0.94812622482360", "-0.97060984525939"},
    {2, "-0.70856869191073", "-0.77232394108548"},
    {3, "-0.05016737946525", "-0.05053523893596"},
    {5, "-0.00129463514931", "-0.00129463735049"},
    {7, "-0.00006682330849", "-0.00006682330851"},
}};

/// Classical columns: exact prime counts and logarithmic sums.
struct ClassicRow {
  std::uint64_t x;
  std::uint64_t pi;
  const char* ls;
};

inline constexpr std::array<ClassicRow, 2> kClassicTable{{
    {100, 25, "29.99144"},
    {200, 46, "50.04329"},
}};

/// Anticipated infinite-x limits of the M-series per family (0 = integers).
struct LimitRow {
  std::uint32_t p;
  double limit;
};

inline constexpr std::array<LimitRow, 5> kConjecturedLimits{{
    {0, -1.0}, {2, -0.8}, {3, -0.051}, {5, -0.0013}, {7, -0.000067},
}};

/// Catalogued integer sequences: all prime powers p (within the 128-digit
/// ceiling) for which base^p - (base-1)^p is prime, with the prime values.
struct SequenceEntry {
  std::uint32_t p;
  const char* value;  // decimal; nullptr when the source truncates it
};

struct SequenceRef {
  const char* id;  // OEIS identifier
  std::uint32_t base;
  std::array<SequenceEntry, 4> entries;
  std::size_t count;
};

inline constexpr std::array<SequenceRef, 5> kSequences{{
    {"A254298", 120,
     {{{2, "239"},
       {3, "42841"},  // = 3*120*119 + 1; sometimes misprinted as 43841
       {7, "20386538221561"},
       {13, "110287289683553081554913641"}}},
     4},
    {"A255387", 141,
     {{{2, "281"}, {3, "59221"}, {13, "769449701919846533025514621"}, {0, nullptr}}},
     3},
    {"A255388", 157,
     {{{2, "313"},
       {3, "73477"},
       {7, "102850464108757"},
       {17, "2202194587566133922938215539676032221"}}},
     4},
    {"A255389", 166, {{{2, "331"}, {3, "82171"}, {5, "3751197451"}, {0, nullptr}}}, 3},
    {"A255390", 173,
     {{{3, "89269"}, {7, "184438202074309"}, {43, nullptr}, {0, nullptr}}},
     3},
}};

}  // namespace shellprime::reference
