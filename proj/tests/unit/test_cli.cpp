#include <doctest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "oracles/select_reference.hpp"
#include "salient/corpus.hpp"
#include "support.hpp"

using namespace salient;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Scratch directory with a tiny trained checkpoint, shared by the suite.
struct Workspace {
  fs::path dir;
  fs::path config, checkpoint;

  Workspace() {
    dir = fs::temp_directory_path() / ("salient_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    config = dir / "tiny.cfg";
    std::ofstream(config) << "# tiny model\nembed_dim = 8\nencoder_hidden = 16\ndecoder_hidden = 16\n"
                             "attention_dim = 16\nmaxout_dim = 16\nclue_dim = 16\nssi_projection_dim = 6\n"
                             "batch_size = 4\nmax_steps = 3\n";
    checkpoint = dir / "m.ckpt";
    auto r = run({"train", "--corpus", test::data_path("wujue20.txt").string(), "--config", config.string(), "--out",
                  checkpoint.string()});
    if (r.code != 0) throw std::runtime_error("workspace training failed: " + r.err);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == cli::kValidation);
    CHECK(run({"bogus"}).code == cli::kValidation);
    auto r = run({"train", "--out", "x.ckpt"});
    CHECK(r.code == cli::kValidation);
    CHECK(r.err.find("--corpus") != std::string::npos);
    CHECK(run({"generate", "--checkpoint", workspace().checkpoint.string()}).code == cli::kValidation);
    CHECK(run({"generate", "--checkpoint", workspace().checkpoint.string(), "--keyword", "明月", "--form", "sonnet"})
              .code == cli::kValidation);
  }

  TEST_CASE("training is reproducible byte for byte") {
    auto& w = workspace();
    const auto again = w.path("again.ckpt");
    auto r = run({"train", "--corpus", test::data_path("wujue20.txt").string(), "--config", w.config.string(), "--out",
                  again, "--loss-csv", w.path("loss.csv")});
    REQUIRE(r.code == 0);
    CHECK(slurp(again) == slurp(w.checkpoint));
    const auto csv = slurp(w.path("loss.csv"));
    CHECK(csv.rfind("step,train_loss,val_loss\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }

  TEST_CASE("unknown config keys are rejected") {
    auto& w = workspace();
    std::ofstream(w.path("bad.cfg")) << "hidden_size = 3\n";
    auto r = run({"train", "--corpus", test::data_path("wujue20.txt").string(), "--config", w.path("bad.cfg"), "--out",
                  w.path("bad.ckpt")});
    CHECK(r.code == cli::kValidation);
    CHECK(r.err.find("hidden_size") != std::string::npos);
  }

  TEST_CASE("generate writes one JSON record per keyword") {
    auto& w = workspace();
    auto r = run({"generate", "--checkpoint", w.checkpoint.string(), "--keyword", "明月", "--keyword", "春风",
                  "--lexicon", test::data_path("tones.tsv").string(), "--beam", "4"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::vector<nlohmann::json> recs;
    for (std::string line; std::getline(in, line);) recs.push_back(nlohmann::json::parse(line));
    REQUIRE(recs.size() == 2);
    CHECK(recs[0]["keyword"] == "明月");
    CHECK(recs[1]["keyword"] == "春风");
    for (const auto& rec : recs) {
      CHECK(rec["lines"].size() == 4);
      CHECK(rec["constraints"] == "in-search");
      CHECK(rec["form_check"]["tone_ok"] == true);
      CHECK(rec["form_check"]["rhyme_ok"] == true);
      REQUIRE(rec["saliency"].size() == 3);
      CHECK(rec["saliency"][0]["line"] == 2);
      CHECK(rec["saliency"][0]["source_line"] == 1);
    }
  }

  TEST_CASE("generate is deterministic across threads") {
    auto& w = workspace();
    std::vector<std::string> base{"generate", "--checkpoint", w.checkpoint.string(), "--keyword", "山中", "--keyword",
                                  "白云", "--keyword", "夜雨", "--constraints", "off", "--beam", "3"};
    auto a = run(base);
    auto threaded = base;
    threaded.insert(threaded.end(), {"--jobs", "3"});
    auto b = run(threaded);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }

  TEST_CASE("generate validates its switches") {
    auto& w = workspace();
    const auto ck = w.checkpoint.string();
    CHECK(run({"generate", "--checkpoint", ck, "--keyword", "明月", "--constraints", "on"}).code == cli::kValidation);
    CHECK(run({"generate", "--checkpoint", ck, "--keyword", "明月", "--clue", "sdu"}).code == cli::kValidation);
    CHECK(run({"generate", "--checkpoint", ck, "--keyword", "明月", "--ext", "intent"}).code == cli::kValidation);
    CHECK(run({"generate", "--checkpoint", ck, "--keyword", "明月", "--beam", "0"}).code == cli::kValidation);
    auto r = run({"generate", "--checkpoint", ck, "--keyword", "明月", "--clue", "ssi", "--beam", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"constraints\":\"off\"") != std::string::npos);
  }

  TEST_CASE("corrupt checkpoints are runtime errors") {
    auto& w = workspace();
    std::ofstream(w.path("junk.ckpt")) << "definitely not a checkpoint";
    auto r = run({"generate", "--checkpoint", w.path("junk.ckpt"), "--keyword", "明月"});
    CHECK(r.code == cli::kRuntime);
    CHECK(r.err.find("magic") != std::string::npos);
  }

  TEST_CASE("eval-bleu prints the expected table") {
    auto& w = workspace();
    std::ofstream(w.path("hyp.txt")) << "床前明月光|疑似地上霜|举头明月|低头思故乡\n";
    std::ofstream(w.path("ref.txt")) << "床前明月光|疑是地上霜|举头望明月|低头思故乡\n";
    auto r = run({"eval-bleu", "--generated", w.path("hyp.txt"), "--references", w.path("ref.txt"), "--out",
                  w.path("bleu.json")});
    REQUIRE(r.code == 0);
    const std::string golden =
        "BLEU\t68.74\n"
        "P1\t0.947368\t(18/19)\n"
        "P2\t0.800000\t(12/15)\n"
        "P3\t0.636364\t(7/11)\n"
        "P4\t0.571429\t(4/7)\n"
        "BP\t0.948729\n"
        "hyp_len\t19\n"
        "ref_len\t20\n";
    CHECK(r.out == golden);
    auto j = nlohmann::json::parse(slurp(w.path("bleu.json")));
    CHECK(j["poems"] == 1);
    CHECK(run({"eval-bleu", "--generated", w.path("hyp.txt"), "--references", test::data_path("wujue20.txt").string()})
              .code == cli::kValidation);
  }

  TEST_CASE("eval-innovation and check-form") {
    auto& w = workspace();
    std::ofstream(w.path("two.txt")) << "春眠不觉晓|处处闻啼鸟|夜来风雨声|花落知多少\n"
                                        "春眠不觉晓|处处闻啼鸟|夜来风雨声|花落知多少\n";
    auto r = run({"eval-innovation", "--generated", w.path("two.txt")});
    REQUIRE(r.code == 0);
    CHECK(r.out == "poems\t2\ninnovation\t1.000000\n");

    r = run({"check-form", "--lexicon", test::data_path("tones.tsv").string(), "--poem", "白日依山尽|黄河入海流|欲穷千里目|更上一层楼"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("poem 1\tlength ok", 0) == 0);
    CHECK(run({"check-form", "--lexicon", test::data_path("tones.tsv").string()}).code == cli::kValidation);
  }

  TEST_CASE("inspect-saliency prints three tables that replay the selection") {
    auto& w = workspace();
    auto r = run({"inspect-saliency", "--checkpoint", w.checkpoint.string(), "--poem",
                  "白日依山尽|黄河入海流|欲穷千里目|更上一层楼"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    int headers = 0;
    std::vector<double> scores;
    std::vector<std::size_t> starred;
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("# line", 0) == 0) {
        ++headers;
        scores.clear();
        starred.clear();
        continue;
      }
      if (line.rfind("index", 0) == 0) continue;
      if (line.rfind("selected\t", 0) == 0) {
        auto expected = oracle::select_reference(scores, 2);
        std::sort(expected.begin(), expected.end());
        CHECK(starred == expected);
        continue;
      }
      std::istringstream cells(line);
      std::size_t idx;
      std::string ch, mark;
      double score;
      cells >> idx >> ch >> score;
      std::getline(cells, mark);
      scores.push_back(score);
      if (mark.find('*') != std::string::npos) starred.push_back(idx);
    }
    CHECK(headers == 3);
    CHECK(r.out.find("# line 1 -> 2\tsource 白日依山尽") != std::string::npos);
    CHECK(run({"inspect-saliency", "--checkpoint", w.checkpoint.string(), "--poem", "白日依山尽|黄河入海流|欲穷千里目|更上一层楼",
               "--form", "qijue"})
              .code == cli::kValidation);
  }

  TEST_CASE("naive saliency rows sum to one") {
    auto& w = workspace();
    const auto naive = w.path("naive.ckpt");
    std::ofstream(w.path("naive.cfg")) << slurp(w.config) << "saliency = naive\n";
    REQUIRE(run({"train", "--corpus", test::data_path("wujue20.txt").string(), "--config", w.path("naive.cfg"), "--out",
                 naive})
                .code == 0);
    auto ck = load_checkpoint(naive);
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto tables = cli::inspect_saliency(ck, corpus.train[3]);
    REQUIRE(tables.size() == 3);
    for (const auto& t : tables) {
      double sum = 0.0;
      for (double s : t.scores) sum += s;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(t.selection.indices == oracle::select_reference(t.scores, 2));
    }
  }

  TEST_CASE("eval-saliency scores annotated poems") {
    auto& w = workspace();
    std::ofstream(w.path("gold.tsv")) << "白日依山尽|黄河入海流|欲穷千里目|更上一层楼\t1,4;0,1;3\n";
    auto r = run({"eval-saliency", "--checkpoint", w.checkpoint.string(), "--annotations", w.path("gold.tsv")});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("poems\t1\nlines\t3\njaccard\t", 0) == 0);
    std::ofstream(w.path("short.tsv")) << "白日依山尽|黄河入海流|欲穷千里目|更上一层楼\t1,4;0,1\n";
    CHECK(run({"eval-saliency", "--checkpoint", w.checkpoint.string(), "--annotations", w.path("short.tsv")}).code ==
          cli::kValidation);
  }
}
