#include <set>

#include <zlib.h>

#include "test_util.hpp"

using namespace summ;
using summ::test::TempDir;
using summ::test::write_text;

namespace {

IdxContent tiny_images(std::uint32_t n = 3) {
  IdxContent c;
  c.kind = IdxKind::images;
  c.count = n;
  c.rows = 2;
  c.cols = 2;
  for (std::uint32_t i = 0; i < n * 4; ++i) c.payload.push_back(static_cast<std::uint8_t>((i * 37) % 256));
  c.payload[0] = 255;
  return c;
}

IdxContent tiny_labels(std::uint32_t n = 3) {
  IdxContent c;
  c.kind = IdxKind::labels;
  c.count = n;
  for (std::uint32_t i = 0; i < n; ++i) c.payload.push_back(static_cast<std::uint8_t>(i % 10));
  return c;
}

void write_gz(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  gzFile f = gzopen(path.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  ASSERT_EQ(gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size())), static_cast<int>(bytes.size()));
  gzclose(f);
}

std::string what_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

const char* kValidYaml =
    "problem.kind: noisy_quadratic\n"
    "problem.dim: 5\n"
    "optimizer.mu: 0.9\n"
    "optimizer.lambda: [0, 1]\n"
    "schedule.alpha: 0.01\n"
    "run.iterations: 100\n";

}  // namespace

TEST(Idx, InMemoryRoundTrip) {
  const auto img = tiny_images();
  const auto parsed = parse_idx(encode_idx(img), IdxKind::images);
  EXPECT_EQ(parsed.count, 3u);
  EXPECT_EQ(parsed.rows, 2u);
  EXPECT_EQ(parsed.cols, 2u);
  EXPECT_EQ(parsed.payload, img.payload);
  EXPECT_EQ(parse_idx(encode_idx(tiny_labels()), IdxKind::labels).payload, tiny_labels().payload);
}

TEST(Idx, FileAndGzipRoundTrip) {
  TempDir dir;
  write_idx(tiny_images(), dir.file("img"));
  write_gz(encode_idx(tiny_labels()), dir.file("lbl.gz"));
  EXPECT_EQ(load_idx(dir.file("img"), IdxKind::images).payload, tiny_images().payload);
  EXPECT_EQ(load_idx(dir.file("lbl.gz"), IdxKind::labels).payload, tiny_labels().payload);
  const auto data = load_mnist(dir.file("img"), dir.file("lbl.gz"));
  EXPECT_EQ(data.size(), 3);
  EXPECT_EQ(data.features(), 4);
  EXPECT_EQ(data.labels, (std::vector<int>{0, 1, 2}));
}

TEST(Idx, BadMagicNamesOffset) {
  auto bytes = encode_idx(tiny_images());
  bytes[3] = 0x07;
  const auto msg = what_of([&] { (void)parse_idx(bytes, IdxKind::images); });
  EXPECT_TRUE(contains(msg, "offset 0")) << msg;
  EXPECT_TRUE(contains(msg, "0x00000807")) << msg;
}

TEST(Idx, KindMismatch) {
  const auto msg = what_of([] { (void)parse_idx(encode_idx(tiny_labels()), IdxKind::images); });
  EXPECT_TRUE(contains(msg, "labels, not images")) << msg;
}

TEST(Idx, TruncatedAndTrailing) {
  auto bytes = encode_idx(tiny_images());
  auto short_payload = bytes;
  short_payload.pop_back();
  EXPECT_TRUE(contains(what_of([&] { (void)parse_idx(short_payload, IdxKind::images); }), "truncated IDX payload"));
  auto short_header = std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 10);
  EXPECT_TRUE(contains(what_of([&] { (void)parse_idx(short_header, IdxKind::images); }), "truncated IDX header"));
  EXPECT_THROW(parse_idx({0x00, 0x00}, IdxKind::labels), IdxFormatError);
  bytes.push_back(0);
  EXPECT_TRUE(contains(what_of([&] { (void)parse_idx(bytes, IdxKind::images); }), "trailing bytes"));
}

TEST(Idx, CorruptGzip) {
  TempDir dir;
  write_gz(encode_idx(tiny_labels(50)), dir.file("l.gz"));
  auto bytes = read_file_bytes(dir.file("l.gz"));
  bytes.resize(bytes.size() / 2);
  std::ofstream(dir.file("cut.gz"), std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                                             static_cast<std::streamsize>(bytes.size()));
  EXPECT_THROW(load_idx(dir.file("cut.gz"), IdxKind::labels), IdxFormatError);
}

TEST(Idx, ScalingAndCountMismatch) {
  const RowMatrix m = images_to_matrix(tiny_images());
  EXPECT_EQ(m.maxCoeff(), 1.0);
  EXPECT_GE(m.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(m(0, 1), 37.0 / 255.0);
  TempDir dir;
  write_idx(tiny_images(3), dir.file("img"));
  write_idx(tiny_labels(4), dir.file("lbl"));
  const auto msg = what_of([&] { (void)load_mnist(dir.file("img"), dir.file("lbl")); });
  EXPECT_TRUE(contains(msg, "image count 3")) << msg;
  EXPECT_TRUE(contains(msg, "label count 4")) << msg;
}

TEST(Idx, RealMnist) {
#ifdef SUMM_MNIST_DIR
  const std::string dir = SUMM_MNIST_DIR;
  if (!std::filesystem::exists(dir + "/train-images-idx3-ubyte")) GTEST_SKIP() << "no MNIST under " << dir;
  const auto train = load_mnist(dir + "/train-images-idx3-ubyte", dir + "/train-labels-idx1-ubyte");
  const auto test = load_mnist(dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte");
  EXPECT_EQ(train.size(), 60000);
  EXPECT_EQ(test.size(), 10000);
  EXPECT_EQ(train.features(), 784);
  EXPECT_EQ(train.inputs.maxCoeff(), 1.0);
  EXPECT_EQ(train.labels[0], 5);  // the first training digit is a five
#else
  GTEST_SKIP() << "built without SUMM_MNIST_DIR";
#endif
}

TEST(Sampler, EpochShuffleCoversEachIndexOnce) {
  MinibatchStream s(60000, 128, 3, Sampling::epoch_shuffle);
  EXPECT_EQ(s.batches_per_epoch(), 469);
  std::vector<int> seen(60000, 0);
  for (int b = 0; b < 469; ++b) {
    const auto idx = s.next();
    EXPECT_EQ(idx.size(), b == 468 ? 96u : 128u);
    for (auto i : idx) ++seen[static_cast<std::size_t>(i)];
  }
  for (int c : seen) ASSERT_EQ(c, 1);
  EXPECT_EQ(s.next().size(), 128u);  // next epoch starts over
}

TEST(Sampler, ShortLastBatch) {
  MinibatchStream s(1000, 128, 1, Sampling::epoch_shuffle);
  EXPECT_EQ(s.batches_per_epoch(), 8);
  for (int b = 0; b < 7; ++b) (void)s.next();
  EXPECT_EQ(s.next().size(), 1000u - 7 * 128);
}

TEST(Sampler, WholeDatasetBatches) {
  MinibatchStream full(10, 3, 1, Sampling::full);
  EXPECT_EQ(full.batches_per_epoch(), 1);
  EXPECT_EQ(full.next(), (std::vector<Index>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  MinibatchStream whole(10, 10, 1, Sampling::epoch_shuffle);
  auto idx = whole.next();
  EXPECT_EQ(std::set<Index>(idx.begin(), idx.end()).size(), 10u);
}

TEST(Sampler, DeterministicAndInRange) {
  MinibatchStream a(500, 32, 9, Sampling::with_replacement), b(500, 32, 9, Sampling::with_replacement);
  for (int k = 0; k < 20; ++k) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    for (auto i : x) ASSERT_TRUE(i >= 0 && i < 500);
  }
  MinibatchStream c(500, 32, 10, Sampling::with_replacement);
  MinibatchStream d(500, 32, 9, Sampling::with_replacement);
  EXPECT_NE(c.next(), d.next());
}

TEST(Sampler, Errors) {
  EXPECT_THROW(MinibatchStream(0, 1, 0, Sampling::with_replacement), DomainError);
  EXPECT_THROW(MinibatchStream(10, 0, 0, Sampling::with_replacement), DomainError);
  EXPECT_THROW(MinibatchStream(10, 11, 0, Sampling::epoch_shuffle), DomainError);
  EXPECT_THROW(parse_sampling("shuffle"), std::invalid_argument);
  for (auto s : {Sampling::with_replacement, Sampling::epoch_shuffle, Sampling::full})
    EXPECT_EQ(parse_sampling(to_string(s)), s);
}

TEST(Config, ShippedSweepConfig) {
  const auto c = load_config(std::string(SUMM_SOURCE_DIR) + "/configs/mnist_sweep.yaml");
  EXPECT_TRUE(c.is_neural());
  EXPECT_EQ(c.lambdas, (std::vector<double>{0, 0.5, 1, 5, 10}));
  EXPECT_EQ(c.seeds.size(), 5u);
  EXPECT_EQ(c.horizon(60000), 23450);
  EXPECT_EQ(c.schedule(c.horizon(60000)).K, 21105);
  EXPECT_EQ(c.hidden, (std::vector<Index>{128}));
  const auto q = load_config(std::string(SUMM_SOURCE_DIR) + "/configs/quadratic.yaml");
  EXPECT_EQ(q.horizon(), 20000);
  EXPECT_EQ(q.schedule(20000).K, 18000);
}

TEST(Config, Defaults) {
  const auto c = parse_config(kValidYaml, "t.yaml");
  EXPECT_EQ(c.dim, 5);
  EXPECT_EQ(c.lambdas.size(), 2u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(c.output_mode, "last");
  EXPECT_EQ(c.formulation, Formulation::unified);
  EXPECT_EQ(c.sampling, Sampling::with_replacement);
}

TEST(Config, LambdaOutsideIntervalIsDomainError) {
  const std::string text = std::string(kValidYaml) + "optimizer.lambda: 12\n";
  EXPECT_THROW(parse_config(kValidYaml + std::string("schedule.p: 1\n"), "t", {"optimizer.lambda=12"}), DomainError);
  // duplicate key in the file itself is a config error
  EXPECT_THROW(parse_config(text, "t"), ConfigError);
  const auto msg = what_of([] { (void)parse_config("run.iterations: 5\noptimizer.lambda: 12\n", "t.yaml"); });
  EXPECT_TRUE(contains(msg, "t.yaml:2")) << msg;
  EXPECT_TRUE(contains(msg, "[0, 1/(1-mu)] = [0, 10]")) << msg;
}

TEST(Config, ParseErrors) {
  EXPECT_TRUE(contains(what_of([] { (void)parse_config("", "e.yaml"); }), "e.yaml:1: parse error"));
  EXPECT_TRUE(contains(what_of([] { (void)parse_config("- 1\n- 2\n", "e.yaml"); }), "parse error"));
  EXPECT_TRUE(contains(what_of([] { (void)parse_config("a: [1, 2\n", "e.yaml"); }), "parse error"));
  const auto unknown = what_of([] { (void)parse_config("run.iterations: 5\nrun.iters: 5\n", "u.yaml"); });
  EXPECT_TRUE(contains(unknown, "u.yaml:2: unknown key 'run.iters'")) << unknown;
  const auto nested = what_of([] { (void)parse_config("run.iterations: 5\nproblem.kind:\n  a: 1\n", "n.yaml"); });
  EXPECT_TRUE(contains(nested, "nested")) << nested;
  EXPECT_THROW(parse_config("optimizer.mu: fast\nrun.iterations: 5\n", "x"), ConfigError);
  EXPECT_THROW(parse_config("problem.kind: quadratic\nrun.iterations: 5\n", "x"), ConfigError);
  EXPECT_THROW(parse_config("run.iterations: 5\nrun.output_mode: best\n", "x"), ConfigError);
}

TEST(Config, RequiredAndConflictingKeys) {
  EXPECT_TRUE(contains(what_of([] { (void)parse_config("problem.dim: 3\n", "x"); }), "run.iterations"));
  EXPECT_THROW(parse_config("run.iterations: 5\nschedule.K: 3\nschedule.K_frac: 0.5\n", "x"), ConfigError);
  EXPECT_TRUE(contains(what_of([] { (void)parse_config("problem.kind: mlp_mnist\n", "x"); }), "data.train_images"));
  EXPECT_THROW(parse_config("run.iterations: 0\n", "x"), ConfigError);
  EXPECT_THROW(parse_config("run.iterations: 5\nschedule.alpha: -1\n", "x"), DomainError);
  EXPECT_THROW(parse_config("run.iterations: 5\nschedule.p: -1\n", "x"), DomainError);
}

TEST(Config, OverridesValidatedLikeFileValues) {
  const auto c = parse_config(kValidYaml, "t", {"schedule.alpha=0.5", "run.seeds=[3, 4]", "schedule.K=7"});
  EXPECT_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(c.schedule(100).K, 7);
  EXPECT_THROW(parse_config(kValidYaml, "t", {"optimizer.lambda=10.1"}), DomainError);
  EXPECT_THROW(parse_config(kValidYaml, "t", {"nope=1"}), ConfigError);
  EXPECT_THROW(parse_config(kValidYaml, "t", {"schedule.alpha"}), ConfigError);
  EXPECT_THROW(parse_config(kValidYaml, "t", {"run.batch=0"}), ConfigError);
}

TEST(Config, LoadFromFile) {
  TempDir dir;
  write_text(dir.file("c.yaml"), kValidYaml);
  EXPECT_EQ(load_config(dir.file("c.yaml")).dim, 5);
  EXPECT_THROW(load_config(dir.file("missing.yaml")), ConfigError);
}

TEST(Metrics, HeaderOnlyFile) {
  TempDir dir;
  write_metrics({}, dir.file("m.csv"));
  EXPECT_EQ(summ::test::read_text(dir.file("m.csv")), std::string(kMetricsHeader) + "\n");
  EXPECT_TRUE(read_metrics(dir.file("m.csv")).empty());
}

TEST(Metrics, RoundTripIsExact) {
  TempDir dir;
  std::vector<MetricsRow> rows;
  for (std::int64_t t = 1; t <= 4; ++t) {
    MetricsRow r{"lam0.5_seed1", 1, "unified", 0.9, 0.5, t, 0.1 / 3.0, 1.0 / double(t * 7), std::nullopt, 0, 0.25};
    if (t % 2 == 0) r.grad_norm = std::sqrt(double(t));
    if (t == 3) r.region_flag = 1;
    rows.push_back(r);
  }
  rows.push_back({"lam1_seed1", 1, "two_step", 0.9, 1.0, 1, 1e-300, 123456789.125, 0.0, 0, 0.0});
  write_metrics(rows, dir.file("m.csv"));
  EXPECT_EQ(read_metrics(dir.file("m.csv")), rows);
  const auto text = summ::test::read_text(dir.file("m.csv"));
  EXPECT_TRUE(contains(text, "lam0.5_seed1,1,unified,0.9,0.5,1,")) << text;
}

TEST(Metrics, WriterRejectsBadOrder) {
  TempDir dir;
  MetricsRow a{"a", 0, "unified", 0.9, 0.0, 1, 0.1, 1.0, std::nullopt, 0, 0.0};
  MetricsRow b = a;
  b.run_id = "b";
  {
    MetricsWriter w(dir.file("i.csv"));
    w.write(a);
    w.write(b);
    a.t = 2;
    EXPECT_THROW(w.write(a), MetricsError);
  }
  {
    MetricsWriter w(dir.file("t.csv"));
    w.write(b);
    EXPECT_THROW(w.write(b), MetricsError);
    b.t = 0;
    EXPECT_THROW(w.write(b), MetricsError);
    b.run_id = "bad,id";
    b.t = 5;
    EXPECT_THROW(w.write(b), MetricsError);
  }
}

TEST(Metrics, ReaderErrors) {
  TempDir dir;
  write_text(dir.file("h.csv"), "t,loss\n1,2\n");
  EXPECT_THROW(read_metrics(dir.file("h.csv")), MetricsError);
  write_text(dir.file("f.csv"), std::string(kMetricsHeader) + "\nx,1,unified\n");
  EXPECT_TRUE(contains(what_of([&] { (void)read_metrics(dir.file("f.csv")); }), "f.csv:2"));
  write_text(dir.file("v.csv"), std::string(kMetricsHeader) + "\nx,1,unified,0.9,0,1,0.1,abc,,0,0\n");
  EXPECT_TRUE(contains(what_of([&] { (void)read_metrics(dir.file("v.csv")); }), "train_loss"));
  EXPECT_THROW(read_metrics(dir.file("absent.csv")), MetricsError);
}

TEST(Metrics, RowsFromTrajectory) {
  const auto p = make_problem(ProblemKind::noisy_quadratic, 3, 2.0, 0.1, 0);
  const auto run = run_experiment(p, make_config(0.9, 1.0), make_schedule(0.01, 5, 1.0), 6, LastOutput{}, 4,
                                  Formulation::three_step);
  const auto rows = rows_from_trajectory(run.trajectory, "lam1_seed4");
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].formulation, "three_step");
  EXPECT_EQ(rows[0].seed, 4u);
  EXPECT_EQ(rows[5].t, 6);
  EXPECT_EQ(rows[5].eta, step_size(make_schedule(0.01, 5, 1.0), 6));
  EXPECT_EQ(rows[5].grad_norm, run.trajectory.steps[5].grad_norm);
}
