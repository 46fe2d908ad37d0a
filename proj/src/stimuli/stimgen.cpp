#include "psyscale/stimuli/stimgen.hpp"

#include <algorithm>
#include <map>

#include "psyscale/error.hpp"
#include "psyscale/io/png.hpp"
#include "psyscale/json.hpp"
#include "psyscale/parallel.hpp"
#include "psyscale/mlds/serialize.hpp"
#include "psyscale/stimuli/pairs.hpp"
#include "psyscale/stimuli/preprocess.hpp"
#include "psyscale/stimuli/sequence.hpp"

namespace psyscale {

namespace fs = std::filesystem;

namespace {

struct CorpusEntry {
  std::string class_id;
  std::string instance;
  std::string viewport;
  fs::path image_path;
};

// Keyed "class/file-stem", which sorts by class first.
std::map<std::string, CorpusEntry> scan_corpus(const fs::path& images_dir) {
  if (!fs::is_directory(images_dir)) {
    throw Error(ErrorCode::IoError, "images directory not found: " + images_dir.string());
  }
  std::map<std::string, CorpusEntry> corpus;
  for (const auto& class_dir : fs::directory_iterator(images_dir)) {
    if (!class_dir.is_directory()) continue;
    const auto class_id = class_dir.path().filename().string();
    for (const auto& file : fs::directory_iterator(class_dir.path())) {
      if (!file.is_regular_file() || file.path().extension() != ".png") continue;
      const auto stem = file.path().stem().string();
      CorpusEntry e{class_id, stem, "front", file.path()};
      if (const auto at = stem.find('@'); at != std::string::npos) {
        e.instance = stem.substr(0, at);
        e.viewport = stem.substr(at + 1);
      }
      if (!is_viewport_tag(e.viewport)) {
        throw Error(ErrorCode::InvalidParameter, file.path().string() + ": unknown viewport tag");
      }
      corpus.emplace(class_id + "/" + stem, std::move(e));
    }
  }
  return corpus;
}

}  // namespace

StimgenSummary run_stimgen(const StimgenOptions& options) {
  if (options.pairs_per_instance == 0) {
    throw Error(ErrorCode::InvalidParameter, "pairs per instance must be >= 1");
  }
  const auto corpus = scan_corpus(options.images_dir);
  if (corpus.size() < 2) throw Error(ErrorCode::InvalidParameter, "corpus needs at least two images");

  std::map<std::string, ObjectMask> masks;
  for (const auto& [key, e] : corpus) {
    const auto mask_path = options.masks_dir / e.class_id / e.image_path.filename();
    if (!fs::exists(mask_path)) {
      throw Error(ErrorCode::MalformedImage, "missing mask for " + e.image_path.string());
    }
    masks.emplace(key, read_mask_png(mask_path));
  }

  PairSelectionOptions select;
  select.per_instance = options.pairs_per_instance;
  select.rng_seed = options.seed;
  select.eligible = [&](const std::string& x, const std::string& y) {
    const auto& ex = corpus.at(x);
    const auto& ey = corpus.at(y);
    return ex.class_id != ey.class_id && ex.viewport == ey.viewport;
  };
  const auto selection = select_pairs(masks, select);

  // Preprocess only the images that take part in a pair.
  std::vector<std::string> used;
  for (const auto& p : selection.pairs) {
    used.push_back(p.a);
    used.push_back(p.b);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::vector<GrayImage> prepared(used.size());
  for (std::size_t i = 0; i < used.size(); ++i) {
    const auto& e = corpus.at(used[i]);
    prepared[i] = preprocess(read_rgb_png(e.image_path), options.blur_sigma);
    const auto& m = masks.at(used[i]);
    if (m.width() != prepared[i].width() || m.height() != prepared[i].height()) {
      throw Error(ErrorCode::MalformedImage, e.image_path.string() + ": mask size differs from image");
    }
  }
  auto image_of = [&](const std::string& key) -> const GrayImage& {
    return prepared[static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), key) - used.begin())];
  };

  std::vector<SequenceSpec> specs;
  for (const auto& p : selection.pairs) {
    const auto& ea = corpus.at(p.a);
    const auto& eb = corpus.at(p.b);
    SequenceSpec spec;
    spec.class_pair = {ea.class_id, eb.class_id};
    spec.instance_a = ea.instance;
    spec.instance_b = eb.instance;
    spec.viewport_tag = ea.viewport;
    spec.validate();
    specs.push_back(std::move(spec));
  }

  const auto n = static_cast<std::ptrdiff_t>(specs.size());
  const auto& pairs = selection.pairs;
  ExceptionSink sink;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    sink.capture([&] {
      const auto& spec = specs[static_cast<std::size_t>(i)];
      const auto& p = pairs[static_cast<std::size_t>(i)];
      const auto seq = generate_sequence(image_of(p.a), image_of(p.b), spec);
      write_sequence(options.out_dir / spec.class_pair.key() / spec.instance_key(), seq);
    });
  }
  sink.rethrow();

  StimgenSummary summary;
  summary.short_instances = selection.short_instances;
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "stimgen";
  doc["seed"] = options.seed;
  doc["pairs_per_instance"] = options.pairs_per_instance;
  doc["blur_sigma"] = options.blur_sigma;
  doc["sequences"] = Json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    summary.sequence_ids.push_back(specs[i].sequence_id());
    doc["sequences"].push_back({{"sequence_id", specs[i].sequence_id()}, {"jaccard", pairs[i].jaccard}});
  }
  doc["short_instances"] = selection.short_instances;
  write_json_file(options.out_dir / "stimgen.json", doc);
  return summary;
}

}  // namespace psyscale
