#include <gtest/gtest.h>

#include <fstream>

#include "embo/dynamics.hpp"
#include "embo/io.hpp"
#include "fixtures.hpp"

namespace embo {
namespace {

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(-0.0), "0");
  EXPECT_EQ(io::format_double(1e-300), "1e-300");
  for (double v : {M_PI, -2.5e-7, 123456789.125, 1.0 / 3.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
}

TEST(DofLabel, FloorAndComponent) {
  EXPECT_EQ(io::dof_label(0), "F1_ux");
  EXPECT_EQ(io::dof_label(7), "F3_uy");
  EXPECT_EQ(io::dof_label(17), "F6_rz");
}

TEST(RecordFile, RoundTripWithMetadata) {
  const auto dir = testing::scratch_dir("io_record");
  Record r;
  r.t0 = 0.5;
  r.dt = 0.02;
  r.channels = {{"ug_x", kAccelerationUnit, {0.0, 1.25, -3.5e-3}}, {"ug_y", kAccelerationUnit, {1.0, 2.0, 3.0}}};
  r.meta["source"] = "unit test";
  io::write_record(dir / "r.csv", r);
  const Record back = io::read_record(dir / "r.csv");
  EXPECT_EQ(back.t0, 0.5);
  EXPECT_EQ(back.dt, 0.02);
  ASSERT_EQ(back.channels.size(), 2u);
  EXPECT_EQ(back.channels[0].samples, r.channels[0].samples);
  EXPECT_EQ(back.channels[1].name, "ug_y");
  EXPECT_EQ(back.meta.at("source"), "unit test");
}

TEST(RecordFile, ReportsMalformedInput) {
  const auto dir = testing::scratch_dir("io_bad");
  io::write_text(dir / "a.csv", "time,x\ns,m/s^2\n0,1\n0.01,oops\n");
  EXPECT_THROW(io::read_record(dir / "a.csv"), InputError);
  io::write_text(dir / "b.csv", "time,x\ns,m/s^2\n0,1\n0.01,2\n0.05,3\n");
  EXPECT_THROW(io::read_record(dir / "b.csv"), InputError);
  io::write_text(dir / "c.csv", "t,x\ns,m/s^2\n0,1\n0.01,2\n");
  EXPECT_THROW(io::read_record(dir / "c.csv"), InputError);
  EXPECT_THROW(io::read_record(dir / "missing.csv"), InputError);
}

TEST(HistoryBinary, RoundTripIsExact) {
  const auto dir = testing::scratch_dir("io_hist");
  const BuildingModel m = testing::box_building(2);
  IntegratorSettings s;
  const auto h = simulate(m, testing::shaking(200, s.dt, 3.0), s);
  io::write_history_binary(dir / "h.bin", h);
  const auto back = io::read_history_binary(dir / "h.bin");
  EXPECT_EQ(back.t, h.t);
  EXPECT_EQ(back.q, h.q);
  EXPECT_EQ(back.ddq, h.ddq);
  EXPECT_EQ(back.wall_force, h.wall_force);
  EXPECT_EQ(back.wall_work, h.wall_work);
}

TEST(HistoryBinary, RejectsForeignAndTruncatedFiles) {
  const auto dir = testing::scratch_dir("io_hist_bad");
  io::write_text(dir / "x.bin", "NOTEMBO!");
  EXPECT_THROW(io::read_history_binary(dir / "x.bin"), InputError);
  const BuildingModel m = testing::box_building(1);
  const auto h = simulate(m, Matrix::Zero(2, 20), IntegratorSettings{});
  io::write_history_binary(dir / "h.bin", h);
  std::string bytes = io::read_text(dir / "h.bin");
  io::write_text(dir / "t.bin", bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(io::read_history_binary(dir / "t.bin"), InputError);
}

TEST(HistoryCsv, HeadersCarryLabelsAndUnits) {
  const auto dir = testing::scratch_dir("io_csv");
  const BuildingModel m = testing::box_building(1);
  const auto h = simulate(m, Matrix::Zero(2, 5), IntegratorSettings{});
  io::write_history_csv(dir / "h", h, m);
  std::ifstream dofs(dir / "h_dofs.csv");
  std::string names, units;
  std::getline(dofs, names);
  std::getline(dofs, units);
  EXPECT_EQ(names.substr(0, 20), "time,q_F1_ux,q_F1_uy");
  EXPECT_EQ(units.substr(0, 11), "s,m,m,rad,m");
  std::ifstream walls(dir / "h_walls.csv");
  std::getline(walls, names);
  EXPECT_EQ(names.substr(0, 19), "time,drift_S1X1,dri");
}

}  // namespace
}  // namespace embo
