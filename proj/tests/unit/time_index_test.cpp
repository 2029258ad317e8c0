#include <gtest/gtest.h>

#include "pvgp/error.hpp"
#include "pvgp/time_index.hpp"

namespace {

using pvgp::TimeIndex;

TEST(TimeIndex, StepsSinceEpoch) {
  const pvgp::UtcTime epoch = pvgp::make_utc(2021, 6, 1);
  EXPECT_EQ(pvgp::timestamp_to_index(epoch, epoch).value, 0);
  EXPECT_EQ(pvgp::timestamp_to_index(pvgp::make_utc(2021, 6, 1, 0, 5), epoch).value, 1);
  EXPECT_EQ(pvgp::timestamp_to_index(pvgp::make_utc(2021, 6, 2), epoch).value, 288);
  EXPECT_EQ(pvgp::timestamp_to_index(pvgp::make_utc(2021, 5, 31, 23, 55), epoch).value, -1);
}

TEST(TimeIndex, RoundTripsOverAYear) {
  const pvgp::UtcTime epoch = pvgp::make_utc(2020, 1, 1);
  for (std::int64_t k = -300; k < 366 * 288; k += 97) {
    const pvgp::UtcTime t = pvgp::index_to_timestamp(TimeIndex{k}, epoch);
    EXPECT_EQ(pvgp::timestamp_to_index(t, epoch).value, k);
  }
}

TEST(TimeIndex, OffGridTimestampIsAlignmentError) {
  const pvgp::UtcTime epoch = pvgp::make_utc(2021, 6, 1);
  const pvgp::UtcTime t = pvgp::make_utc(2021, 6, 1, 10, 2, 30);
  EXPECT_FALSE(pvgp::on_step_boundary(t, epoch));
  EXPECT_THROW(pvgp::timestamp_to_index(t, epoch), pvgp::AlignmentError);
}

TEST(TimeIndex, MidnightOf) {
  EXPECT_EQ(pvgp::midnight_of(pvgp::make_utc(2021, 3, 14, 23, 59, 59)),
            pvgp::make_utc(2021, 3, 14));
}

TEST(UtcText, ParsesAcceptedForms) {
  const pvgp::UtcTime want = pvgp::make_utc(2021, 6, 1, 13, 45);
  for (const char* s : {"2021-06-01T13:45:00Z", "2021-06-01T13:45:00", "2021-06-01 13:45:00",
                        "2021-06-01T13:45:00+00:00", " 2021-06-01T13:45:00Z\r"})
    EXPECT_EQ(pvgp::parse_utc(s), want) << s;
  EXPECT_EQ(pvgp::parse_utc("2021-06-01"), pvgp::make_utc(2021, 6, 1));
}

TEST(UtcText, RejectsMalformed) {
  for (const char* s : {"", "2021-6-1", "2021-06-01T13:45", "2021-06-01T13:45:00+01:00",
                        "2021-02-30", "2021-13-01", "2021-06-01T24:00:00", "yesterday"})
    EXPECT_THROW(pvgp::parse_utc(s), pvgp::DataError) << s;
}

TEST(UtcText, FormatRoundTrip) {
  const pvgp::UtcTime t = pvgp::make_utc(2024, 2, 29, 7, 5, 9);
  EXPECT_EQ(pvgp::format_utc(t), "2024-02-29T07:05:09Z");
  EXPECT_EQ(pvgp::parse_utc(pvgp::format_utc(t)), t);
}

}  // namespace
