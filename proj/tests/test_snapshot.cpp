#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vinstruct/engine.hpp"
#include "vinstruct/snapshot.hpp"

namespace vinstruct {
namespace {

using testing::cn;

TEST(FormatFixed, NineDecimalsNoNegativeZero) {
  EXPECT_EQ(format_fixed(0.2), "0.200000000");
  EXPECT_EQ(format_fixed(-1.5), "-1.500000000");
  EXPECT_EQ(format_fixed(-0.0), "0.000000000");
  EXPECT_EQ(format_fixed(-1e-12), "0.000000000");
  EXPECT_EQ(format_fixed(1234.5), "1234.500000000");
}

TEST(Snapshot, InitialSceneIsByteStable) {
  const auto& db = *testing::pneumatic_db();
  const auto a = snapshot(initial_scene(db));
  const auto b = snapshot(initial_scene(load_manifest(testing::data_dir() / "manifest.json")));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("step_cursor 0\nclip none\n", 0), 0u);
}

TEST(Snapshot, OneLinePerInstanceInKeyOrder) {
  const auto& db = *testing::pneumatic_db();
  const auto text = snapshot(initial_scene(db));
  EXPECT_NE(text.find("\nbase#0 active=true animating=false color=(0.700000000,0.700000000,0.720000000,"
                      "1.000000000) position=(0.300000000,0.000000000,0.010000000) "
                      "orientation=(1.000000000,0.000000000,0.000000000,0.000000000)\n"),
            std::string::npos);
  EXPECT_LT(text.find("\nbase#0"), text.find("\ncylinder#0"));
  EXPECT_LT(text.find("\nsmall_screw#0"), text.find("\nsmall_screw#3"));
}

TEST(Snapshot, SensitiveToOneColorChannel) {
  const auto& db = *testing::pneumatic_db();
  const auto scene = initial_scene(db);
  auto changed = scene;
  changed.instances.at({"base", 0}).color.b = 0.5;
  EXPECT_NE(snapshot(scene), snapshot(changed));
}

TEST(Snapshot, IncludesClip) {
  const auto& db = *testing::pneumatic_db();
  const auto scene = generate_instruction(db, initial_scene(db), ExtractionResult(cn("fixture"), cn("small_screw"), 2));
  const auto text = snapshot(scene);
  EXPECT_NE(text.find("clip target=small_screw anchor=fixture instances=2 duration=2.000000000 looping=true\n"),
            std::string::npos);
  EXPECT_NE(text.find("clip.offset#1 (0.030000000,0.000000000,0.000000000)\n"), std::string::npos);
}

TEST(DifferingRange, LocatesTheChangedBytes) {
  EXPECT_FALSE(differing_range("abc", "abc").has_value());
  const auto d = differing_range("hello world", "hello there world");
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->begin, 6u);
  EXPECT_EQ(d->expected_end, 6u);
  EXPECT_EQ(d->actual_end, 12u);
  const auto t = differing_range("abc", "abd");
  EXPECT_EQ(t->begin, 2u);
  EXPECT_EQ(t->expected_end, 3u);
  EXPECT_EQ(t->actual_end, 3u);
  const auto shorter = differing_range("abcabc", "abc");
  EXPECT_EQ(shorter->begin, 3u);
  EXPECT_EQ(shorter->expected_end, 6u);
  EXPECT_EQ(shorter->actual_end, 3u);
}

TEST(Goldens, BundledWalkthroughMatchesCommittedGoldens) {
  TrainingSession session(testing::pneumatic_db(), testing::pneumatic_steps());
  const RuleExtractor extractor(testing::pneumatic_lexicon(), testing::pneumatic_rules());
  for (const auto& step : session.steps()) {
    const auto outcome = session.next(extractor);
    char name[32];
    std::snprintf(name, sizeof name, "step_%02d.snap", step.index);
    const auto golden = testing::read_file(testing::data_dir() / "goldens" / name);
    EXPECT_EQ(snapshot(session.scene()), golden) << name;
    // Highlighted set is exactly {predecessor, successor, combined}.
    EXPECT_EQ(highlighted_records(session.database(), session.scene()),
              (std::set<std::string>{outcome.triple.predecessor().str(), outcome.triple.successor().str(),
                                     combined_name(outcome.triple.predecessor(), outcome.triple.successor()).str()}));
  }
}

}  // namespace
}  // namespace vinstruct
