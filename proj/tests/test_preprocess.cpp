#include "doctest.h"
#include "fixtures.hpp"
#include "gg/error.hpp"
#include "gg/preprocess.hpp"
#include "support.hpp"

using namespace gg;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::NotFound;
}

const std::string kRawHeader = "sr_no,merit_no,merit_marks,app_id,name,gender,cast,location,percent,type,class\n";

}  // namespace

TEST_CASE("merit discretization") {
  CHECK(discretize_merit(153) == Merit::good);
  CHECK(discretize_merit(109) == Merit::bad);
  CHECK(discretize_merit(120) == Merit::good);
  CHECK(discretize_merit(119.99) == Merit::bad);
  CHECK(discretize_merit(0) == Merit::bad);
  CHECK(discretize_merit(200) == Merit::good);
  CHECK(code_of([] { discretize_merit(200.5); }) == Errc::OutOfRange);
  CHECK(code_of([] { discretize_merit(-1); }) == Errc::OutOfRange);
  CHECK(code_of([] { discretize_merit(std::nan("")); }) == Errc::OutOfRange);
}

TEST_CASE("percent discretization") {
  CHECK(discretize_percent(95.66) == PercentClass::distinction);
  CHECK(discretize_percent(65.0) == PercentClass::first_class);
  CHECK(discretize_percent(59.99) == PercentClass::second_class);
  CHECK(discretize_percent(70.0) == PercentClass::distinction);
  CHECK(discretize_percent(60.0) == PercentClass::first_class);
  CHECK(discretize_percent(100.0) == PercentClass::distinction);
  CHECK(code_of([] { discretize_percent(123); }) == Errc::OutOfRange);
  CHECK(code_of([] { discretize_percent(-0.01); }) == Errc::OutOfRange);
}

TEST_CASE("discretization is monotone") {
  test::Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double a = rng.between(0, 100);
    const double b = rng.between(0, 100);
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(discretize_percent(lo) <= discretize_percent(hi));
    CHECK(discretize_merit(2 * lo) <= discretize_merit(2 * hi));
  }
}

TEST_CASE("custom thresholds") {
  Thresholds t{100, 150, 80, 50};
  CHECK(discretize_merit(100, t) == Merit::good);
  CHECK(discretize_percent(79.9, t) == PercentClass::first_class);
  CHECK(discretize_percent(49.9, t) == PercentClass::second_class);
  CHECK(code_of([&] { discretize_merit(151, t); }) == Errc::OutOfRange);
  CHECK(code_of([] { Thresholds{120, 200, 60, 70}.validate(); }) == Errc::InvalidConfig);
  CHECK(code_of([] { Thresholds{220, 200, 70, 60}.validate(); }) == Errc::InvalidConfig);
}

TEST_CASE("admission type normalization") {
  CHECK(normalize_admission_type("AI") == AdmissionType::AI);
  CHECK(normalize_admission_type("GOPENH") == AdmissionType::OTHER);
  CHECK(normalize_admission_type("ai") == AdmissionType::AI);
  CHECK(normalize_admission_type("  AI ") == AdmissionType::AI);
  CHECK(normalize_admission_type("AIX") == AdmissionType::OTHER);
  CHECK(code_of([] { normalize_admission_type("  "); }) == Errc::EmptyCode);
}

TEST_CASE("clean drops incomplete rows") {
  const auto raw = parse_csv(test::kFig2Raw, raw_student_schema());
  const auto all = clean(raw);
  CHECK(all.dataset == raw);
  CHECK(all.dropped.empty());

  const auto three = parse_csv(kRawHeader + "1,1,150,A,N,Male,O,L,80,AI,pass\n"
                                            "2,2,150,B,N,Male,O,L,,AI,pass\n"
                                            "3,3,150,C,N,Male,O,L,80,AI,fail\n",
                               raw_student_schema());
  const auto cleaned = clean(three);
  CHECK(cleaned.dataset.size() == 2);
  CHECK(cleaned.dropped == std::vector<std::size_t>{1});

  const auto unlabeled = parse_csv(kRawHeader + "1,1,150,A,N,Male,O,L,80,AI,\n2,2,150,B,N,Male,O,L,70,AI,\n",
                                   raw_student_schema());
  const auto none = clean(unlabeled);
  CHECK(none.dataset.empty());
  CHECK(none.dropped == std::vector<std::size_t>{0, 1});
  CHECK(clean(unlabeled, false).dataset.size() == 2);

  // identifiers and ignored columns may be blank
  const auto sparse = parse_csv(kRawHeader + ",,150,,,Male,,,80,AI,pass\n", raw_student_schema());
  CHECK(clean(sparse).dropped.empty());
}

TEST_CASE("preprocess maps the published rows") {
  const auto raw = parse_csv(test::kFig2Raw, raw_student_schema());
  const auto processed = preprocess(raw);
  const auto expected = parse_csv(test::kFig2Processed, processed_student_schema());
  CHECK(processed == expected);
  CHECK(processed.rows()[5] == Row{{std::string("bad"), std::string("Male"), std::string("distinction"),
                                    std::string("OTHER"), std::string("pass")}});

  CHECK(preprocess(Dataset(raw_student_schema())).empty());
}

TEST_CASE("preprocess errors name the row") {
  const auto raw = parse_csv(kRawHeader + "1,1,150,A,N,Male,O,L,80,AI,pass\n2,2,150,B,N,Male,O,L,123,AI,pass\n",
                             raw_student_schema());
  try {
    preprocess(raw);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OutOfRange);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }

  const auto odd_label = parse_csv(kRawHeader + "1,1,150,A,N,Male,O,L,80,AI,maybe\n", raw_student_schema());
  CHECK(code_of([&] { preprocess(odd_label); }) == Errc::DomainViolation);

  CHECK(code_of([] { parse_csv(kRawHeader + "1,1,150,A,N,Other,O,L,80,AI,pass\n", raw_student_schema()); }) ==
        Errc::DomainViolation);
}

TEST_CASE("every raw row is kept, dropped, or raises") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto raw = parse_csv(test::raw_ladder_csv(60, seed), raw_student_schema());
    // blank out some cells
    auto rows = raw.rows();
    test::Rng rng(seed + 100);
    for (auto& row : rows)
      if (rng.below(5) == 0) row.cells[raw.schema().index_of(rng.coin() ? "percent" : "class")] = Missing{};
    const Dataset holed(raw.schema(), rows);
    const auto result = preprocess_detailed(holed);
    CHECK(result.dataset.size() + result.dropped.size() == holed.size());
    CHECK(result.source_rows.size() == result.dataset.size());
    for (const auto& row : result.dataset.rows())
      for (const auto& cell : row.cells) CHECK_FALSE(is_missing(cell));
  }
}

TEST_CASE("unlabeled rows survive when the class is optional") {
  const auto raw = parse_csv(test::raw_ladder_csv(10, 4, false), raw_student_schema());
  const auto result = preprocess_detailed(raw, {Thresholds{}, false});
  CHECK(result.dataset.size() == 10);
  CHECK(is_missing(result.dataset.cell(0, 4)));
}

TEST_CASE("layout detection") {
  CHECK(detect_layout(test::kFig2Raw) == CsvLayout::Raw);
  CHECK(detect_layout(test::kFig2Processed) == CsvLayout::Processed);
  CHECK(code_of([] { detect_layout("a,b,c\n"); }) == Errc::AmbiguousHeader);
  CHECK(code_of([] { detect_layout("merit,merit_marks\n"); }) == Errc::AmbiguousHeader);
  CHECK(parse_student_csv(test::kFig2Raw).schema() == raw_student_schema());
  CHECK(parse_student_csv(test::kFig2Processed).size() == 11);
}

TEST_CASE("lowercase labels") {
  const auto raw = parse_csv(test::raw_ladder_csv(30, 9), raw_student_schema());
  const auto processed = preprocess(raw);
  for (const auto& row : processed.rows()) {
    const auto& label = std::get<std::string>(row.cells[4]);
    CHECK((label == "pass" || label == "fail"));
  }
}
