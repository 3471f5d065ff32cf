#include "uqeval/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uqeval/npy.hpp"

namespace uqeval {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string join_issues(const std::vector<ManifestIssue>& issues) {
  std::string out = std::to_string(issues.size()) + " manifest problem(s):";
  for (const auto& i : issues) out += "\n  - [" + std::string(to_string(i.kind)) + "] " + i.message;
  return out;
}

const std::set<std::string> kTopKeys = {"schema_version", "dataset_name", "class_count",
                                        "background_class", "seed_tag", "images"};
const std::set<std::string> kImageKeys = {"image_id", "split", "role", "grid_path", "annotation_paths"};

}  // namespace

ManifestError::ManifestError(std::vector<ManifestIssue> issues)
    : Error(issues.empty() ? ErrorKind::InconsistentManifest : issues.front().kind, join_issues(issues)),
      issues_(std::move(issues)) {}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError({{ErrorKind::MissingFile, "cannot open manifest " + path.string()}});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ManifestError({{ErrorKind::ParseError, path.string() + ": " + e.what()}});
  }

  std::vector<ManifestIssue> issues;
  const auto issue = [&issues](ErrorKind k, std::string msg) { issues.push_back({k, std::move(msg)}); };

  DatasetManifest m;
  m.base_dir = path.parent_path();
  if (!doc.is_object()) throw ManifestError({{ErrorKind::ParseError, "manifest root must be a JSON object"}});
  for (const auto& [key, _] : doc.items()) {
    if (!kTopKeys.contains(key)) issue(ErrorKind::ParseError, "unknown top-level key '" + key + "'");
  }

  const auto get = [&](const json& obj, const char* key, auto fallback, bool required, const std::string& where) {
    using T = decltype(fallback);
    if (!obj.contains(key)) {
      if (required) issue(ErrorKind::ParseError, where + "missing key '" + key + "'");
      return fallback;
    }
    try {
      return obj.at(key).template get<T>();
    } catch (const json::exception&) {
      issue(ErrorKind::ParseError, where + "key '" + key + "' has the wrong type");
      return fallback;
    }
  };

  const int version = get(doc, "schema_version", 0, true, "");
  if (doc.contains("schema_version") && version != DatasetManifest::kSchemaVersion) {
    issue(ErrorKind::ParseError, "unsupported schema_version " + std::to_string(version));
  }
  m.dataset_name = get(doc, "dataset_name", std::string(), true, "");
  const auto classes = get(doc, "class_count", std::int64_t{0}, true, "");
  m.background_class = get(doc, "background_class", std::int32_t{0}, false, "");
  m.seed_tag = get(doc, "seed_tag", std::string(), false, "");
  if (classes < 2) issue(ErrorKind::InconsistentManifest, "class_count must be at least 2");
  m.class_count = classes < 0 ? 0 : static_cast<std::size_t>(classes);
  if (m.background_class < 0 || static_cast<std::size_t>(m.background_class) >= m.class_count) {
    issue(ErrorKind::InconsistentManifest, "background_class " + std::to_string(m.background_class) + " outside [0, class_count)");
  }

  if (!doc.contains("images") || !doc["images"].is_array()) {
    issue(ErrorKind::ParseError, "'images' must be an array");
  } else {
    std::set<std::string> ids;
    std::size_t position = 0;
    for (const auto& entry : doc["images"]) {
      const std::string where = "images[" + std::to_string(position++) + "]: ";
      if (!entry.is_object()) {
        issue(ErrorKind::ParseError, where + "entry must be an object");
        continue;
      }
      for (const auto& [key, _] : entry.items()) {
        if (!kImageKeys.contains(key)) issue(ErrorKind::ParseError, where + "unknown key '" + key + "'");
      }
      ManifestImage img;
      img.image_id = get(entry, "image_id", std::string(), true, where);
      img.split = get(entry, "split", std::string("id"), true, where);
      img.role = get(entry, "role", std::string("test"), true, where);
      img.grid_path = get(entry, "grid_path", std::string(), true, where);
      for (const auto& a : get(entry, "annotation_paths", std::vector<std::string>{}, false, where)) {
        img.annotation_paths.emplace_back(a);
      }
      const std::string label = where + "'" + img.image_id + "' ";
      if (img.image_id.empty()) issue(ErrorKind::InconsistentManifest, where + "empty image_id");
      if (!ids.insert(img.image_id).second) {
        issue(ErrorKind::InconsistentManifest, "duplicate image_id '" + img.image_id + "'");
      }
      if (img.split != "id" && !(img.is_ood() && img.split.size() > 4)) {
        issue(ErrorKind::InconsistentManifest, label + "split must be \"id\" or \"ood:<tag>\", got \"" + img.split + "\"");
      }
      if (img.role != "train" && img.role != "val" && img.role != "test") {
        issue(ErrorKind::InconsistentManifest, label + "role must be train, val or test, got \"" + img.role + "\"");
      }

      std::size_t rows = 0, cols = 0;
      const auto grid = m.resolve(img.grid_path);
      if (img.grid_path.empty()) {
        // already reported as a missing key
      } else if (!std::filesystem::exists(grid)) {
        issue(ErrorKind::MissingFile, label + "grid file " + grid.string() + " does not exist");
      } else {
        try {
          const NpyHeader h = read_npy_header(grid);
          if (h.shape.size() != 5) {
            issue(ErrorKind::ShapeRankError, label + "grid " + grid.string() + " has rank " + std::to_string(h.shape.size()) + ", expected 5");
          } else {
            rows = h.shape[3];
            cols = h.shape[4];
            if (h.shape[2] != m.class_count) {
              issue(ErrorKind::InconsistentClassCount, label + "grid " + grid.string() + " has " +
                                                           std::to_string(h.shape[2]) + " classes, manifest declares " +
                                                           std::to_string(m.class_count));
            }
          }
        } catch (const Error& e) {
          issue(e.kind(), label + e.what());
        }
      }
      for (const auto& ap : img.annotation_paths) {
        const auto ann = m.resolve(ap);
        if (!std::filesystem::exists(ann)) {
          issue(ErrorKind::MissingFile, label + "annotation file " + ann.string() + " does not exist");
          continue;
        }
        try {
          const NpyHeader h = read_npy_header(ann);
          if (h.shape.size() != 2) {
            issue(ErrorKind::ShapeRankError, label + "annotation " + ann.string() + " must be rank 2");
          } else if (rows != 0 && (h.shape[0] != rows || h.shape[1] != cols)) {
            issue(ErrorKind::ShapeMismatch, label + "annotation " + ann.string() + " is " + std::to_string(h.shape[0]) +
                                                "x" + std::to_string(h.shape[1]) + ", grid is " + std::to_string(rows) +
                                                "x" + std::to_string(cols));
          }
        } catch (const Error& e) {
          issue(e.kind(), label + e.what());
        }
      }
      if (img.role == "test" && img.annotation_paths.size() < 2) {
        m.warnings.push_back("image '" + img.image_id + "' has fewer than two annotations and is skipped for AMB");
      }
      m.images.push_back(std::move(img));
    }
  }
  if (!issues.empty()) throw ManifestError(std::move(issues));
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  ordered_json doc;
  doc["schema_version"] = DatasetManifest::kSchemaVersion;
  doc["dataset_name"] = m.dataset_name;
  doc["class_count"] = m.class_count;
  doc["background_class"] = m.background_class;
  doc["seed_tag"] = m.seed_tag;
  doc["images"] = ordered_json::array();
  for (const auto& img : m.images) {
    ordered_json e;
    e["image_id"] = img.image_id;
    e["split"] = img.split;
    e["role"] = img.role;
    e["grid_path"] = img.grid_path.generic_string();
    e["annotation_paths"] = ordered_json::array();
    for (const auto& a : img.annotation_paths) e["annotation_paths"].push_back(a.generic_string());
    doc["images"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << manifest_to_json(manifest);
}

std::uint64_t manifest_hash(const DatasetManifest& manifest) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : manifest_to_json(manifest)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace uqeval
