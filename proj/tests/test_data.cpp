// Copyright 2026 The hqb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "hqb/checksum.hpp"
#include "hqb/data/dataset.hpp"
#include "hqb/data/prepare.hpp"
#include "hqb/data/table.hpp"
#include "hqb/rng.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

using namespace hqb;
using namespace hqb::data;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string &name) {
    const auto d = fs::path(HQB_TEST_TMP) / "data" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

RawTable parse(const std::string &text, CsvSchema schema = {}) {
    std::istringstream in(text);
    return parse_csv(in, schema);
}

RawTable synthetic_table(std::size_t rows, std::size_t features, std::size_t classes,
                         std::uint64_t seed = 1) {
    Rng rng(seed);
    RawTable t;
    t.n_features = features;
    t.n_classes = classes;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t f = 0; f < features; ++f) {
            t.values.push_back(rng.uniform(-5, 5));
        }
        t.labels.push_back(static_cast<int>(r % classes));
    }
    for (std::size_t c = 0; c < classes; ++c) {
        t.class_names.push_back(std::to_string(c));
    }
    return t;
}

/// Banknote-shaped CSV: four numeric features then an integer class.
fs::path write_banknote_like(const fs::path &dir, std::size_t rows) {
    const auto p = dir / "banknote.csv";
    std::ofstream out(p);
    Rng rng(2);
    for (std::size_t r = 0; r < rows; ++r) {
        for (int f = 0; f < 4; ++f) {
            out << rng.uniform(-10, 10) << ',';
        }
        out << (r < rows * 5 / 9 ? 0 : 1) << '\n';
    }
    return p;
}

void put_be32(std::vector<unsigned char> &b, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) {
        b.push_back(static_cast<unsigned char>((v >> s) & 0xFFU));
    }
}

std::vector<unsigned char> idx_images(std::uint32_t n, std::uint32_t rows, std::uint32_t cols,
                                      unsigned char fill_base = 0) {
    std::vector<unsigned char> b;
    put_be32(b, kIdxImagesMagic);
    put_be32(b, n);
    put_be32(b, rows);
    put_be32(b, cols);
    for (std::uint32_t i = 0; i < n * rows * cols; ++i) {
        b.push_back(static_cast<unsigned char>((fill_base + i) % 256));
    }
    return b;
}

std::vector<unsigned char> idx_labels(std::uint32_t n, std::uint32_t classes = 10) {
    std::vector<unsigned char> b;
    put_be32(b, kIdxLabelsMagic);
    put_be32(b, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        b.push_back(static_cast<unsigned char>(i % classes));
    }
    return b;
}

void write_bytes(const fs::path &p, const std::vector<unsigned char> &b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char *>(b.data()), static_cast<std::streamsize>(b.size()));
}

} // namespace

TEST_CASE("sha256 known answers", "[data]") {
    Sha256 empty;
    CHECK(empty.finish() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    Sha256 abc;
    const char text[] = {'a', 'b', 'c'};
    abc.update_values(std::span<const char>(text, 3));
    CHECK(abc.finish() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("rng streams are reproducible and independent", "[data]") {
    Rng a = Rng::derive(5, "split");
    Rng b = Rng::derive(5, "split");
    Rng c = Rng::derive(5, "batches");
    Rng d = Rng::derive(5, "batches", 1);
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    CHECK(Rng::derive(5, "batches").next() != d.next());
    Rng u(9);
    for (int i = 0; i < 10000; ++i) {
        const double v = u.uniform(-0.1, 0.1);
        CHECK(v >= -0.1);
        CHECK(v < 0.1);
        CHECK(u.below(7) < 7);
    }
    std::vector<int> items(50);
    std::iota(items.begin(), items.end(), 0);
    auto shuffled = items;
    u.shuffle(shuffled);
    CHECK(shuffled != items);
    std::sort(shuffled.begin(), shuffled.end());
    CHECK(shuffled == items);
}

TEST_CASE("csv parsing", "[data]") {
    const auto t = parse("a,b,label\n1,2,M\n3,4,B\n5,6,M\n");
    CHECK(t.n_rows() == 3);
    CHECK(t.n_features == 2);
    CHECK(t.n_classes == 2);
    CHECK(t.labels == std::vector<int>{0, 1, 0});
    CHECK(t.class_names == std::vector<std::string>{"M", "B"});
    CHECK(t.values == std::vector<double>{1, 2, 3, 4, 5, 6});

    const auto ints = parse("0.5,1\n0.25,0\n\n0.75,1\n");
    CHECK(ints.n_rows() == 3);
    CHECK(ints.labels == std::vector<int>{1, 0, 1});
    CHECK(ints.class_names == std::vector<std::string>{"0", "1"});

    // Integers that do not form 0..k-1 fall back to first-appearance order.
    const auto sparse = parse("1,2\n1,4\n1,2\n");
    CHECK(sparse.labels == std::vector<int>{0, 1, 0});
    CHECK(sparse.class_names == std::vector<std::string>{"2", "4"});

    const auto first = parse("y,x1,x2\n1,0.1,0.2\n0,0.3,0.4\n", CsvSchema{0, HeaderMode::Auto});
    CHECK(first.values == std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK(first.labels == std::vector<int>{1, 0});

    const auto padded = parse(" 1.5 , 2 ,0\n+3,4e1, 1\n");
    CHECK(padded.values == std::vector<double>{1.5, 2, 3, 40});
}

TEST_CASE("csv errors", "[data]") {
    CHECK_THROWS_AS(parse("1,2,0\n3,4\n"), ParseError);
    CHECK_THROWS_AS(parse("1,2,0\n3,x,1\n"), ParseError);
    CHECK_THROWS_AS(parse("1,2,\n"), ParseError);
    CHECK_THROWS_AS(parse("a,b,c\n"), DomainError);
    CHECK_THROWS_AS(parse(""), DomainError);
    CHECK_THROWS_AS(parse("5\n"), ParseError);
    CHECK_THROWS_AS(parse("1,2,0\n", CsvSchema{7, HeaderMode::Auto}), ParseError);
    CHECK_THROWS_AS(load_csv(fs::path(HQB_TEST_TMP) / "nope.csv"), IoError);
    try {
        parse("1,2,0\n3,4,1\n5,6\n");
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(std::string(e.what()).find('3') != std::string::npos);
    }
}

TEST_CASE("idx parsing", "[data]") {
    const auto imgs = idx_images(3, 2, 2);
    const auto labs = idx_labels(3);
    const auto t = parse_idx(imgs, labs);
    CHECK(t.n_rows() == 3);
    CHECK(t.n_features == 4);
    CHECK(t.values[5] == 5.0);
    CHECK(t.labels == std::vector<int>{0, 1, 2});
    CHECK(t.n_classes == 3);

    auto bad_magic = imgs;
    bad_magic[3] = 0x01;
    CHECK_THROWS_AS(parse_idx(bad_magic, labs), FormatError);
    CHECK_THROWS_AS(parse_idx(imgs, idx_labels(4)), FormatError);
    auto truncated = imgs;
    truncated.pop_back();
    CHECK_THROWS_AS(parse_idx(truncated, labs), FormatError);
    auto short_labels = labs;
    short_labels.pop_back();
    CHECK_THROWS_AS(parse_idx(imgs, short_labels), FormatError);
    CHECK_THROWS_AS(parse_idx(std::vector<unsigned char>(8), labs), FormatError);

    const auto joined = concatenate_with_test(t, parse_idx(idx_images(2, 2, 2), idx_labels(2)));
    CHECK(joined.n_rows() == 5);
    CHECK(joined.designated_test_start == std::optional<std::size_t>(3));
}

TEST_CASE("min-max normalization", "[data]") {
    RawTable t;
    t.n_features = 2;
    t.n_classes = 1;
    t.values = {0, 7, 5, 7, 10, 7};
    t.labels = {0, 0, 0};
    const auto n = normalize_minmax(t);
    CHECK(n.features(0, 0) == 0.0);
    CHECK(n.features(0, 1) == 0.5);
    CHECK(n.features(0, 2) == 1.0);
    for (Eigen::Index c = 0; c < 3; ++c) {
        CHECK(n.features(1, c) == 0.0);
    }
    CHECK(n.bounds.mins == std::vector<double>{0, 7});
    CHECK(n.bounds.maxs == std::vector<double>{10, 7});

    const auto big = synthetic_table(200, 6, 3);
    const auto nb = normalize_minmax(big);
    CHECK(nb.features.minCoeff() == 0.0);
    CHECK(nb.features.maxCoeff() == 1.0);
    for (Eigen::Index f = 0; f < 6; ++f) {
        CHECK(nb.features.row(f).minCoeff() == 0.0);
        CHECK(nb.features.row(f).maxCoeff() == 1.0);
    }
}

TEST_CASE("pixel normalization", "[data]") {
    RawTable t;
    t.n_features = 3;
    t.n_classes = 1;
    t.values = {0, 127.5, 255};
    t.labels = {0};
    const auto n = normalize_pixels(t);
    CHECK(n.features(0, 0) == 0.0);
    CHECK(n.features(1, 0) == 0.5);
    CHECK(n.features(2, 0) == 1.0);
    t.values[1] = 256;
    CHECK_THROWS_AS(normalize_pixels(t), DomainError);
}

TEST_CASE("one-hot labels", "[data]") {
    const Matrix m = one_hot({2, 0, 1}, 3);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 3);
    CHECK(m(2, 0) == 1.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m.colwise().sum().minCoeff() == 1.0);
    CHECK(m.colwise().sum().maxCoeff() == 1.0);
    CHECK_THROWS_AS(one_hot({3}, 3), DomainError);
}

TEST_CASE("8:1:1 split sizes", "[data]") {
    const auto s = split_dataset(synthetic_table(1372, 4, 2), SplitPolicy::EightOneOne, 0);
    CHECK(s.train.size() == 1098);
    CHECK(s.val.size() == 137);
    CHECK(s.test.size() == 137);
    const auto bc = split_dataset(synthetic_table(569, 30, 2), SplitPolicy::EightOneOne, 0);
    CHECK(bc.val.size() == 56);
    CHECK(bc.test.size() == 56);
    CHECK(bc.train.size() == 457);
}

TEST_CASE("mnist split sizes", "[data]") {
    RawTable t;
    t.n_features = 0;
    t.labels.assign(70000, 0);
    t.designated_test_start = 60000;
    const auto s = split_dataset(t, SplitPolicy::MnistFiveSevenths, 3);
    CHECK(s.train.size() == 50000);
    CHECK(s.val.size() == 10000);
    CHECK(s.test.size() == 10000);
    CHECK(s.test.front() == 60000);
    CHECK(s.test.back() == 69999);
    CHECK(*std::max_element(s.train.begin(), s.train.end()) < 60000);
    CHECK(*std::max_element(s.val.begin(), s.val.end()) < 60000);
    CHECK_THROWS_AS(split_dataset(t, SplitPolicy::EightOneOne, 3), DomainError);
    t.designated_test_start.reset();
    CHECK_THROWS_AS(split_dataset(t, SplitPolicy::MnistFiveSevenths, 3), DomainError);
    CHECK(split_policy_from_string("5/7:1/7:1/7") == SplitPolicy::MnistFiveSevenths);
    CHECK_THROWS_AS(split_policy_from_string("7:2:1"), DomainError);
}

TEST_CASE("splits partition the rows and depend only on the seed", "[data][property]") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + rng.below(500);
        const auto t = synthetic_table(n, 2, 2, trial);
        const std::uint64_t seed = rng.below(1000);
        const auto s = split_dataset(t, SplitPolicy::EightOneOne, seed);
        std::vector<std::size_t> all;
        for (const auto *p : {&s.train, &s.val, &s.test}) {
            all.insert(all.end(), p->begin(), p->end());
        }
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expected(n);
        std::iota(expected.begin(), expected.end(), std::size_t{0});
        CHECK(all == expected);
        CHECK(s.val.size() == n / 10);
        CHECK(s.test.size() == n / 10);
        const auto again = split_dataset(synthetic_table(n, 2, 2, trial + 100), SplitPolicy::EightOneOne, seed);
        CHECK(again.checksum() == s.checksum());
        CHECK(split_dataset(t, SplitPolicy::EightOneOne, seed + 1).checksum() != s.checksum());
    }
}

TEST_CASE("mini-batches", "[data]") {
    std::vector<std::size_t> subset(23);
    std::iota(subset.begin(), subset.end(), std::size_t{100});
    const auto b = batches(subset, 5, 7, 0);
    REQUIRE(b.size() == 5);
    CHECK(b.back().size() == 3);
    std::vector<std::size_t> all;
    for (const auto &x : b) {
        all.insert(all.end(), x.begin(), x.end());
    }
    CHECK(all != subset);
    std::sort(all.begin(), all.end());
    CHECK(all == subset);
    CHECK(batches(subset, 5, 7, 0) == b);
    CHECK(batches(subset, 5, 7, 1) != b);
    CHECK(batches(subset, 100, 7, 0).size() == 1);
    CHECK_THROWS_AS(batches(subset, 0, 7, 0), DomainError);
}

TEST_CASE("subsampling", "[data]") {
    auto t = synthetic_table(100, 2, 2);
    const auto s = subsample(t, 30, std::nullopt, 4);
    CHECK(s.n_rows() == 30);
    CHECK_FALSE(s.designated_test_start);
    // Rows keep their original relative order.
    std::size_t last = 0;
    for (std::size_t r = 0; r < s.n_rows(); ++r) {
        std::size_t found = 0;
        for (std::size_t q = 0; q < t.n_rows(); ++q) {
            if (t.row(q)[0] == s.row(r)[0] && t.row(q)[1] == s.row(r)[1]) {
                found = q;
            }
        }
        CHECK((r == 0 || found > last));
        last = found;
    }
    CHECK(subsample(t, 500, std::nullopt, 4).n_rows() == 100);

    t.designated_test_start = 80;
    const auto m = subsample(t, 40, 10, 4);
    CHECK(m.n_rows() == 50);
    CHECK(m.designated_test_start == std::optional<std::size_t>(40));
    const auto split = split_dataset(m, SplitPolicy::MnistFiveSevenths, 0);
    CHECK(split.test.size() == 10);
    CHECK(split.val.size() == 10);
    CHECK(split.train.size() == 30);
}

TEST_CASE("dataset assembly", "[data]") {
    const auto t = synthetic_table(50, 3, 2);
    const auto d = make_dataset(t, NormalizationMode::MinMax, SplitPolicy::EightOneOne, 9, "synthetic");
    CHECK(d.n_samples() == 50);
    CHECK(d.n_features() == 3);
    CHECK(d.labels_one_hot.rows() == 2);
    CHECK(d.subset("val").size() == 5);
    CHECK_THROWS_AS(d.subset("holdout"), DomainError);
    const Matrix g = gather(d.features, {4, 1});
    CHECK(g.col(0) == d.features.col(4));
    CHECK(g.col(1) == d.features.col(1));
}

TEST_CASE("prepare a csv dataset and reload it", "[data]") {
    const auto dir = tmp_dir("prepare-csv");
    const auto csv = write_banknote_like(dir, 1372);
    PrepareOptions opts;
    opts.dataset = "banknote";
    opts.inputs = {csv};
    opts.seed = 3;
    const auto p = prepare_dataset(opts);
    CHECK(p.dataset.n_samples() == 1372);
    CHECK(p.dataset.n_classes == 2);
    CHECK(p.manifest.at("split").at("train") == 1098);
    CHECK(p.manifest.at("split").at("val") == 137);
    CHECK(p.manifest.at("split").at("test") == 137);
    CHECK(p.manifest.at("normalization").at("mode") == "minmax");
    CHECK(p.manifest.at("sources")[0].at("sha256") == sha256_file(csv));

    const auto out = dir / "prepared";
    write_dataset_manifest(out, p.manifest);
    const auto back = load_prepared(out);
    CHECK(back.dataset.split.checksum() == p.dataset.split.checksum());
    CHECK(back.dataset.features == p.dataset.features);

    std::ofstream(csv, std::ios::app) << "1,2,3,4,0\n";
    CHECK_THROWS_AS(load_prepared(out), FormatError);
    CHECK_THROWS_AS(load_prepared(dir / "missing"), IoError);
}

TEST_CASE("prepare rejects mismatched inputs", "[data]") {
    const auto dir = tmp_dir("prepare-bad");
    const auto csv = write_banknote_like(dir, 40);
    PrepareOptions opts;
    opts.dataset = "breastcancer";
    opts.inputs = {csv};
    CHECK_THROWS_AS(prepare_dataset(opts), DimensionError);
    opts.dataset = "iris";
    CHECK_THROWS_AS(prepare_dataset(opts), DomainError);
    opts.dataset = "banknote";
    opts.inputs = {csv, csv};
    CHECK_THROWS_AS(prepare_dataset(opts), DomainError);
    opts.inputs = {dir / "missing.csv"};
    CHECK_THROWS(prepare_dataset(opts));
}

TEST_CASE("prepare an idx dataset", "[data]") {
    const auto dir = tmp_dir("prepare-idx");
    write_bytes(dir / "train-images-idx3-ubyte", idx_images(70, 28, 28));
    write_bytes(dir / "train-labels-idx1-ubyte", idx_labels(70));
    write_bytes(dir / "t10k-images-idx3-ubyte", idx_images(10, 28, 28, 3));
    write_bytes(dir / "t10k-labels-idx1-ubyte", idx_labels(10));
    PrepareOptions opts;
    opts.dataset = "mnist";
    opts.inputs = {dir};
    const auto p = prepare_dataset(opts);
    CHECK(p.dataset.n_samples() == 80);
    CHECK(p.dataset.n_features() == 784);
    CHECK(p.dataset.n_classes == 10);
    CHECK(p.dataset.split.test.size() == 10);
    CHECK(p.dataset.split.val.size() == 10);
    CHECK(p.dataset.split.train.size() == 60);
    CHECK(p.manifest.at("normalization").at("mode") == "pixel255");
    CHECK(p.dataset.features.maxCoeff() <= 1.0);

    opts.subsample = 35;
    opts.subsample_test = 5;
    const auto s = prepare_dataset(opts);
    CHECK(s.dataset.n_samples() == 40);
    CHECK(s.dataset.split.train.size() == 30);
    CHECK(s.manifest.at("subsample") == 35);

    opts.inputs = {dir / "train-images-idx3-ubyte"};
    CHECK_THROWS_AS(prepare_dataset(opts), DomainError);
}
