#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "bubblelab/io.hpp"

using namespace bubblelab;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bubblelab_test_" + name)).string();
}

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::nextafter(1.0, 2.0)}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Io, PlaneFieldRoundTripIsBitExact) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d, GridSpec{1.0, 8, 8});
  const ModalField u = eval_bubble(grid, BubbleParams::on_axis(d, 0.4, 1.0, 1.3), 1e-8);
  const std::string path = temp_path("plane.json");
  save_field(path, u);
  const FieldFile f = load_field(path);
  ASSERT_TRUE(f.plane.has_value());
  EXPECT_FALSE(f.sphere.has_value());
  EXPECT_EQ(f.plane->grid().spec(), u.grid().spec());
  EXPECT_EQ(f.plane->axis(), u.axis());
  ASSERT_EQ(f.plane->profiles().rows(), u.profiles().rows());
  ASSERT_EQ(f.plane->profiles().cols(), u.profiles().cols());
  EXPECT_TRUE((f.plane->profiles().array() == u.profiles().array()).all());
  EXPECT_EQ(field_to_json(*f.plane), field_to_json(u));
  std::filesystem::remove(path);
}

TEST(Io, SphereFieldRoundTripIsBitExact) {
  const Dimension d(4);
  auto sphere = SphereGrid::make(d, 24);
  const ZonalSphereField v = ZonalSphereField::sample(sphere, [](double t) { return 1.0 + t / 3.0 + std::sin(t); });
  const FieldFile f = field_from_json(field_to_json(v));
  ASSERT_TRUE(f.sphere.has_value());
  EXPECT_EQ(f.sphere->size(), 24);
  EXPECT_EQ(f.sphere->dim().n(), 4);
  EXPECT_TRUE((f.sphere->samples().array() == v.samples().array()).all());
}

TEST(Io, RejectsNewerSchemaAndMalformedFiles) {
  const Dimension d(3);
  auto sphere = SphereGrid::make(d, 8);
  std::string text = field_to_json(ZonalSphereField::constant(sphere, 1.0));
  const auto pos = text.find("\"1.0\"");
  ASSERT_NE(pos, std::string::npos);
  std::string newer = text;
  newer.replace(pos, 5, "\"2.0\"");
  EXPECT_THROW(field_from_json(newer), InvalidArgument);
  std::string minor = text;
  minor.replace(pos, 5, "\"1.7\"");
  EXPECT_NO_THROW(field_from_json(minor));
  EXPECT_THROW(field_from_json("{}"), InvalidArgument);
  EXPECT_THROW(field_from_json("not json"), InvalidArgument);
}

TEST(Io, NonFiniteSamplesNeverReachAFile) {
  const Dimension d(3);
  auto sphere = SphereGrid::make(d, 8);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(sphere->size());
  s(3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(field_to_json(ZonalSphereField(sphere, s)), NonPositiveField);
}

TEST(Io, ParsesScenarios) {
  EXPECT_EQ(parse_scenario("bubble").kind, "bubble");
  const ScenarioSpec e = parse_scenario("eps=1e-3");
  EXPECT_EQ(e.kind, "perturbed");
  EXPECT_DOUBLE_EQ(e.get("eps", 0.0), 1e-3);
  EXPECT_EQ(parse_scenario("d=20").kind, "two-bubble");
  const ScenarioSpec b = parse_scenario("bubble,kappa=2,lambda=0.5,z=0.3");
  EXPECT_DOUBLE_EQ(b.get("kappa", 1.0), 2.0);
  EXPECT_DOUBLE_EQ(b.get("lambda", 1.0), 0.5);
  EXPECT_DOUBLE_EQ(b.get("alpha", 7.0), 7.0);
  EXPECT_THROW(parse_scenario("triangle"), InvalidArgument);
  EXPECT_THROW(parse_scenario("eps=abc"), InvalidArgument);
  EXPECT_THROW(parse_scenario("bubble,stationary"), InvalidArgument);
}

TEST(Io, RunConfigRejectsUnknownKeys) {
  const RunConfig c = parse_run_config(R"({"n": 4, "grid": {"panels": 16}, "flow": {"s_end": 3.5}})");
  EXPECT_EQ(c.n, 4);
  EXPECT_EQ(c.grid.panels, 16);
  EXPECT_DOUBLE_EQ(c.flow.s_end, 3.5);
  EXPECT_THROW(parse_run_config(R"({"n": 4, "colour": 1})"), InvalidArgument);
  EXPECT_THROW(parse_run_config(R"({"flow": {"sEnd": 1}})"), InvalidArgument);
  EXPECT_THROW(parse_run_config(R"({"n": "three"})"), InvalidArgument);
}

TEST(Io, DiagnosticsCsvIsDeterministic) {
  FlowConfig c;
  c.s_end = 0.5;
  const std::string a = diagnostics_csv(run(c));
  const std::string b = diagnostics_csv(run(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "s,J,I,delta,K0,mass,rhoH1,alpha,lambda,z,dt_accepted");
}

TEST(Io, AtomicWriteReplacesContent) {
  const std::string path = temp_path("atomic.txt");
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  std::filesystem::remove(path);
  EXPECT_THROW(read_file(path), InvalidArgument);
}

TEST(Io, SvgPlotIsWellFormed) {
  const std::string svg = svg_plot("t", "x", "y", {PlotSeries{"a", {0, 1, 2}, {1, 0.1, 0.01}, false}}, true);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
}
