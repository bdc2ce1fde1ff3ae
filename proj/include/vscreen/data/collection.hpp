#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vscreen/chem/fingerprint.hpp"
#include "vscreen/core/errors.hpp"

namespace vscreen::data {

enum class Group { PCBA, MUV, DUDE, TOX21, SYNTH };

std::string to_string(Group g);
Group group_from_string(const std::string& s);

struct Record {
  std::string compound_id;
  chem::Fingerprint fingerprint;
  int label = 0;        // 1 = active
  double weight = 1.0;  // per-example loss weight; trainers rescale actives
};

struct Dataset {
  std::string id;
  Group group = Group::SYNTH;
  std::string target_class;
  std::string target;
  bool duplicate_target = false;
  std::vector<Record> records;

  std::size_t n_active() const;
  std::size_t n_inactive() const { return records.size() - n_active(); }
};

// How compound identity is established across datasets (for AOR and
// intersections): by compound_id when namespaces agree, by fingerprint bytes
// otherwise.
enum class MatchMode { CompoundId, Fingerprint };

struct Collection {
  std::vector<Dataset> datasets;
  std::vector<std::string> held_in;
  std::vector<std::string> held_out;
  MatchMode match_mode = MatchMode::CompoundId;
  std::size_t nbits = 1024;

  const Dataset& dataset(const std::string& id) const;
  int dataset_index(const std::string& id) const;  // -1 when absent
  std::vector<std::string> dataset_ids() const;

  // Identity key of a record under the collection's match mode.
  std::string compound_key(const Record& r) const;

  void validate() const;
};

// Featurization accounting, kept per dataset and rolled up per group.
struct FeaturizationCounts {
  std::size_t total = 0;
  std::size_t parsed = 0;
  std::size_t failed = 0;
  double failure_rate() const {
    return total == 0 ? 0.0 : static_cast<double>(failed) / static_cast<double>(total);
  }
};

struct LoadReport {
  std::map<std::string, FeaturizationCounts> per_dataset;
  std::map<std::string, FeaturizationCounts> per_group;
  std::vector<std::string> messages;  // one per failed row: where and why
};

struct LoadResult {
  Collection collection;
  LoadReport report;
};

// Manifest: JSON with "datasets": [{id, group, target_class, target, path,
// duplicate_target}], optional held_in/held_out id lists, optional nbits,
// radius and match_on. Dataset CSVs carry header compound_id,smiles,label.
// Rows whose SMILES fail to parse (or exceed valences) are excluded and
// counted; duplicate compound ids within a dataset are an error. Datasets
// load in parallel on up to `threads` workers.
LoadResult load_collection(const std::string& manifest_path,
                           unsigned threads = 1);

// Self-contained collection files for synthetic or pre-featurized data;
// fingerprints stored as hex.
void save_collection(const Collection& c, const std::string& path);
Collection load_collection_file(const std::string& path);

}  // namespace vscreen::data
