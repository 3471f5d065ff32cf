#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uqeval/error.hpp"

namespace uqeval {

struct ManifestImage {
  std::string image_id;
  std::string split = "id";  // "id" or "ood:<tag>"
  std::string role = "test";  // train | val | test
  std::filesystem::path grid_path;
  std::vector<std::filesystem::path> annotation_paths;

  bool is_ood() const noexcept { return split.starts_with("ood:"); }
  std::string ood_tag() const { return is_ood() ? split.substr(4) : std::string(); }
};

/// JSON dataset description. Relative paths resolve against `base_dir`
/// (the directory holding the manifest file).
struct DatasetManifest {
  static constexpr int kSchemaVersion = 1;

  std::string dataset_name;
  std::size_t class_count = 2;
  std::int32_t background_class = 0;
  std::string seed_tag;
  std::vector<ManifestImage> images;

  std::filesystem::path base_dir;
  std::vector<std::string> warnings;  // filled by load_manifest

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
  }
};

struct ManifestIssue {
  ErrorKind kind;
  std::string message;
};

/// Raised by load_manifest with every violation found, not just the first.
class ManifestError : public Error {
 public:
  explicit ManifestError(std::vector<ManifestIssue> issues);
  const std::vector<ManifestIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ManifestIssue> issues_;
};

/// Parses and validates: schema and unknown keys, unique ids, split/role
/// syntax, file existence, grid rank and class count (from NPY headers),
/// annotation shapes. Test images with fewer than two annotations only warn.
DatasetManifest load_manifest(const std::filesystem::path& path);

std::string manifest_to_json(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// FNV-1a 64 over the canonical JSON text.
std::uint64_t manifest_hash(const DatasetManifest& manifest);

}  // namespace uqeval
