// ramdec/kaldi-archive.h

// Copyright 2026  The ramdec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RAMDEC_KALDI_ARCHIVE_H_
#define RAMDEC_KALDI_ARCHIVE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ramdec/base.h"
#include "ramdec/matrix.h"

namespace ramdec {

/// One utterance's T x D feature rows.
struct FeatureMatrix {
  std::string key;
  Matrix<float> values;

  int NumRows() const { return values.NumRows(); }
  int NumCols() const { return values.NumCols(); }
  bool operator==(const FeatureMatrix &other) const = default;
};

/// Per-frame pdf indices of one utterance.
struct AlignmentVector {
  std::string key;
  std::vector<std::int32_t> pdf_ids;
  bool operator==(const AlignmentVector &other) const = default;
};

enum class ArchiveMode { kBinary, kText };

/// Non-empty, and free of space, NUL and newline bytes.
bool IsValidKey(std::string_view key);

// Archive entries are read one at a time; only the current entry is held in
// memory.  Binary vs. text is detected per entry from the "\0B" marker that
// follows the key's separating space.
class ArchiveReaderBase {
 public:
  explicit ArchiveReaderBase(std::istream &is) : is_(is) {}

  /// Diagnostics that did not stop reading (duplicate keys).
  const std::vector<std::string> &Warnings() const { return warnings_; }

 protected:
  // Reads the key and its trailing space.  Returns false at a clean end of
  // stream.  Sets binary_ and entry_offset_.
  bool ReadKey(std::string *key);

  int Get();          // next byte or EOF, advancing offset_
  int Peek();
  void ReadBytes(char *buf, std::size_t n, const char *what);
  std::int32_t ReadInt32(const char *what);  // size-prefixed, LE
  std::string ReadToken();                   // up to and including a space
  [[noreturn]] void Fail(const std::string &msg) const;

  std::istream &is_;
  std::int64_t offset_ = 0;
  std::int64_t entry_offset_ = 0;
  std::string key_;
  bool binary_ = false;

 private:
  std::unordered_set<std::string> seen_keys_;
  std::vector<std::string> warnings_;
};

class MatrixArchiveReader : public ArchiveReaderBase {
 public:
  using ArchiveReaderBase::ArchiveReaderBase;
  /// Returns false at end of stream; throws ArchiveError on bad input.
  bool Next(FeatureMatrix *out);

 private:
  void ReadBinary(Matrix<float> *m);
  void ReadText(Matrix<float> *m);
};

class IntVectorArchiveReader : public ArchiveReaderBase {
 public:
  using ArchiveReaderBase::ArchiveReaderBase;
  bool Next(AlignmentVector *out);

 private:
  void ReadBinary(std::vector<std::int32_t> *v);
  void ReadText(std::vector<std::int32_t> *v);
};

class MatrixArchiveWriter {
 public:
  MatrixArchiveWriter(std::ostream &os, ArchiveMode mode) : os_(os), mode_(mode) {}
  void Write(const FeatureMatrix &entry);

 private:
  std::ostream &os_;
  ArchiveMode mode_;
};

class IntVectorArchiveWriter {
 public:
  IntVectorArchiveWriter(std::ostream &os, ArchiveMode mode) : os_(os), mode_(mode) {}
  void Write(const AlignmentVector &entry);

 private:
  std::ostream &os_;
  ArchiveMode mode_;
};

std::vector<FeatureMatrix> ReadMatrixArchive(
    std::istream &is, std::vector<std::string> *warnings = nullptr);
std::vector<AlignmentVector> ReadIntVectorArchive(
    std::istream &is, std::vector<std::string> *warnings = nullptr);

/// All entries are validated before the first byte is written.
void WriteMatrixArchive(std::span<const FeatureMatrix> entries, ArchiveMode mode,
                        std::ostream &os);
void WriteIntVectorArchive(std::span<const AlignmentVector> entries,
                           ArchiveMode mode, std::ostream &os);

// File-path conveniences.
std::vector<FeatureMatrix> ReadMatrixArchiveFile(const std::string &path);
std::vector<AlignmentVector> ReadIntVectorArchiveFile(const std::string &path);

}  // namespace ramdec

#endif  // RAMDEC_KALDI_ARCHIVE_H_
