// Regenerates the golden files under tests/golden and the command-line fixture
// under tests/fixtures. Usage: make-goldens <tests dir>

#include <filesystem>
#include <iostream>

#include "omnilabel/error.hpp"
#include "reference_pipeline.hpp"

namespace fs = std::filesystem;
namespace ol = omnilabel;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make-goldens <tests dir>\n";
    return 1;
  }
  try {
    const fs::path root = argv[1];
    fs::create_directories(root / "golden");
    fs::create_directories(root / "fixtures");

    const ol::Corpus corpus = ol::reference::pipeline_corpus();
    const auto preds = ol::reference::pipeline_predictions(corpus);
    for (auto f : ol::reference::kWeakFormats) {
      const fs::path out = root / "golden" / ol::reference::pipeline_golden_name(f);
      ol::write_text(out, ol::reference::pipeline_output(corpus, preds, f));
      std::cout << "wrote " << out.string() << "\n";
    }

    // The command-line golden is solved exhaustively so it does not depend on
    // the Hungarian implementation it is used to check.
    const ol::Corpus small = ol::reference::cli_fixture_corpus();
    const auto small_preds = ol::reference::cli_fixture_predictions(small);
    const ol::LabelFile labels = ol::downgrade_corpus(small, ol::LabelFormat::tags_k, 3);
    ol::save_coco(small, root / "fixtures" / "tags_k_coco.json");
    ol::save_labels(labels, root / "fixtures" / "tags_k_labels.json");
    ol::write_predictions(small_preds, root / "fixtures" / "tags_k_predictions.jsonl");
    const auto brute = ol::filter_corpus(small_preds, labels, ol::FilterConfig{}, 1,
                                         [](const ol::CostMatrix& c) { return ol::brute_force(c); });
    ol::save_pseudo(brute, small, root / "golden" / "cli_tags_k.json");
    std::cout << "wrote command-line fixture\n";
  } catch (const std::exception& e) {
    std::cerr << "make-goldens: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
