// kaldi-archive.cc

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

#include "ramdec/kaldi-archive.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace ramdec {

namespace {

// Entries larger than this are rejected as corrupt rather than allocated.
constexpr std::int64_t kMaxElements = std::int64_t{1} << 31;

void PutInt32(std::ostream &os, std::int32_t value) {
  auto u = static_cast<std::uint32_t>(value);
  char bytes[5] = {4, static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                   static_cast<char>((u >> 16) & 0xff),
                   static_cast<char>((u >> 24) & 0xff)};
  os.write(bytes, 5);
}

void PutRawInt32(std::ostream &os, std::uint32_t u) {
  char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                   static_cast<char>((u >> 16) & 0xff),
                   static_cast<char>((u >> 24) & 0xff)};
  os.write(bytes, 4);
}

std::uint32_t LoadLe32(const unsigned char *p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

bool IsBlank(int c) { return c == ' ' || c == '\t' || c == '\r'; }

void CheckKey(const std::string &key) {
  if (!IsValidKey(key))
    throw Error("invalid archive key '" + key +
                "' (must be non-empty without whitespace or NUL)");
}

}  // namespace

bool IsValidKey(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '\0') return false;
  return true;
}

// ArchiveReaderBase

int ArchiveReaderBase::Get() {
  int c = is_.get();
  if (c != std::char_traits<char>::eof()) ++offset_;
  return c;
}

int ArchiveReaderBase::Peek() { return is_.peek(); }

void ArchiveReaderBase::Fail(const std::string &msg) const {
  throw ArchiveError(msg, entry_offset_, key_);
}

void ArchiveReaderBase::ReadBytes(char *buf, std::size_t n, const char *what) {
  is_.read(buf, static_cast<std::streamsize>(n));
  auto got = is_.gcount();
  offset_ += got;
  if (static_cast<std::size_t>(got) != n)
    Fail(std::string("truncated payload while reading ") + what);
}

std::int32_t ArchiveReaderBase::ReadInt32(const char *what) {
  int width = Get();
  if (width != 4)
    Fail(std::string("expected int32 size marker before ") + what);
  unsigned char bytes[4];
  ReadBytes(reinterpret_cast<char *>(bytes), 4, what);
  return static_cast<std::int32_t>(LoadLe32(bytes));
}

std::string ArchiveReaderBase::ReadToken() {
  std::string token;
  while (true) {
    int c = Get();
    if (c == std::char_traits<char>::eof()) Fail("truncated header token");
    if (c == ' ') break;
    token.push_back(static_cast<char>(c));
    if (token.size() > 16) Fail("malformed header token");
  }
  return token;
}

bool ArchiveReaderBase::ReadKey(std::string *key) {
  int c = Peek();
  while (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
    Get();
    c = Peek();
  }
  entry_offset_ = offset_;
  key_.clear();
  if (c == std::char_traits<char>::eof()) return false;
  while (true) {
    c = Get();
    if (c == std::char_traits<char>::eof()) Fail("end of stream inside key");
    if (c == ' ') break;
    if (c == '\0' || c == '\n') Fail("key contains NUL or newline");
    key_.push_back(static_cast<char>(c));
  }
  binary_ = false;
  if (Peek() == '\0') {
    Get();
    if (Get() != 'B') Fail("bad binary marker");
    binary_ = true;
  }
  if (!seen_keys_.insert(key_).second)
    warnings_.push_back("duplicate key '" + key_ + "' at byte " +
                        std::to_string(entry_offset_));
  *key = key_;
  return true;
}

// MatrixArchiveReader

bool MatrixArchiveReader::Next(FeatureMatrix *out) {
  if (!ReadKey(&out->key)) return false;
  if (binary_)
    ReadBinary(&out->values);
  else
    ReadText(&out->values);
  return true;
}

void MatrixArchiveReader::ReadBinary(Matrix<float> *m) {
  std::string token = ReadToken();
  if (token == "DM") Fail("double-precision matrices are not supported");
  if (token == "CM" || token == "CM2" || token == "CM3")
    Fail("compressed matrices are not supported");
  if (token != "FM") Fail("unknown object token '" + token + "'");
  std::int32_t rows = ReadInt32("row count");
  std::int32_t cols = ReadInt32("column count");
  if (rows < 1 || cols < 1)
    Fail("invalid dimensions " + std::to_string(rows) + "x" + std::to_string(cols));
  if (std::int64_t{rows} * cols > kMaxElements)
    Fail("dimensions overflow: " + std::to_string(rows) + "x" + std::to_string(cols));
  *m = Matrix<float>(rows, cols);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(rows) * cols * 4);
  ReadBytes(reinterpret_cast<char *>(bytes.data()), bytes.size(), "matrix data");
  auto &data = m->Data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint32_t u = LoadLe32(&bytes[4 * i]);
    std::memcpy(&data[i], &u, 4);
  }
}

void MatrixArchiveReader::ReadText(Matrix<float> *m) {
  int c = Get();
  while (IsBlank(c)) c = Get();
  if (c != '[') Fail("expected '[' at start of text matrix");
  std::vector<float> values;
  int cols = -1;
  int rows = 0;
  std::size_t row_start = 0;
  std::string token;
  bool done = false;
  auto flush_token = [&]() {
    if (token.empty()) return;
    float v = 0.0f;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
      Fail("bad float '" + token + "' in text matrix");
    if (!std::isfinite(v)) Fail("non-finite value '" + token + "' in text matrix");
    values.push_back(v);
    token.clear();
  };
  auto end_row = [&]() {
    std::size_t n = values.size() - row_start;
    if (n == 0) return;
    if (cols < 0) cols = static_cast<int>(n);
    if (static_cast<int>(n) != cols)
      Fail("ragged text matrix: row " + std::to_string(rows) + " has " +
           std::to_string(n) + " values, expected " + std::to_string(cols));
    ++rows;
    row_start = values.size();
  };
  while (!done) {
    c = Get();
    if (c == std::char_traits<char>::eof()) Fail("end of stream inside text matrix");
    if (c == ']') {
      flush_token();
      end_row();
      done = true;
    } else if (c == '\n') {
      flush_token();
      end_row();
    } else if (IsBlank(c)) {
      flush_token();
    } else {
      token.push_back(static_cast<char>(c));
    }
  }
  // Rest of the line after ']'.
  while (IsBlank(Peek())) Get();
  if (Peek() == '\n') Get();
  if (rows == 0) Fail("empty text matrix");
  *m = Matrix<float>(rows, cols);
  m->Data() = std::move(values);
}

// IntVectorArchiveReader

bool IntVectorArchiveReader::Next(AlignmentVector *out) {
  if (!ReadKey(&out->key)) return false;
  if (binary_)
    ReadBinary(&out->pdf_ids);
  else
    ReadText(&out->pdf_ids);
  return true;
}

void IntVectorArchiveReader::ReadBinary(std::vector<std::int32_t> *v) {
  int width = Get();
  if (width == std::char_traits<char>::eof()) Fail("truncated payload");
  if (width != 4) Fail("unsupported integer width " + std::to_string(width));
  std::int32_t size = ReadInt32("vector size");
  if (size < 0) Fail("negative vector size " + std::to_string(size));
  std::vector<unsigned char> bytes(static_cast<std::size_t>(size) * 4);
  ReadBytes(reinterpret_cast<char *>(bytes.data()), bytes.size(), "vector data");
  v->resize(size);
  for (std::int32_t i = 0; i < size; ++i) {
    (*v)[i] = static_cast<std::int32_t>(LoadLe32(&bytes[4 * i]));
    if ((*v)[i] < 0) Fail("negative element " + std::to_string((*v)[i]));
  }
}

void IntVectorArchiveReader::ReadText(std::vector<std::int32_t> *v) {
  v->clear();
  std::string token;
  auto flush = [&]() {
    if (token.empty()) return;
    std::int32_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
      Fail("bad integer '" + token + "'");
    if (value < 0) Fail("negative element " + token);
    v->push_back(value);
    token.clear();
  };
  while (true) {
    int c = Get();
    if (c == std::char_traits<char>::eof() || c == '\n') break;
    if (IsBlank(c))
      flush();
    else
      token.push_back(static_cast<char>(c));
  }
  flush();
}

// Writers

void MatrixArchiveWriter::Write(const FeatureMatrix &entry) {
  CheckKey(entry.key);
  const Matrix<float> &m = entry.values;
  if (m.NumRows() < 1 || m.NumCols() < 1)
    throw Error("matrix '" + entry.key + "' has empty dimensions");
  os_ << entry.key << ' ';
  if (mode_ == ArchiveMode::kBinary) {
    os_.write("\0BFM ", 5);
    PutInt32(os_, m.NumRows());
    PutInt32(os_, m.NumCols());
    for (float v : m.Data()) {
      std::uint32_t u;
      std::memcpy(&u, &v, 4);
      PutRawInt32(os_, u);
    }
  } else {
    os_ << " [\n";
    for (int r = 0; r < m.NumRows(); ++r) {
      os_ << ' ';
      for (float v : m.Row(r)) os_ << ' ' << FormatFloat(v);
      os_ << (r + 1 == m.NumRows() ? " ]\n" : "\n");
    }
  }
}

void IntVectorArchiveWriter::Write(const AlignmentVector &entry) {
  CheckKey(entry.key);
  for (std::int32_t v : entry.pdf_ids)
    if (v < 0)
      throw Error("negative element " + std::to_string(v) + " in vector '" +
                  entry.key + "'");
  os_ << entry.key << ' ';
  if (mode_ == ArchiveMode::kBinary) {
    os_.write("\0B\4", 3);
    PutInt32(os_, static_cast<std::int32_t>(entry.pdf_ids.size()));
    for (std::int32_t v : entry.pdf_ids) PutRawInt32(os_, static_cast<std::uint32_t>(v));
  } else {
    for (std::size_t i = 0; i < entry.pdf_ids.size(); ++i)
      os_ << (i ? " " : "") << entry.pdf_ids[i];
    os_ << '\n';
  }
}

std::vector<FeatureMatrix> ReadMatrixArchive(std::istream &is,
                                             std::vector<std::string> *warnings) {
  MatrixArchiveReader reader(is);
  std::vector<FeatureMatrix> out;
  FeatureMatrix m;
  while (reader.Next(&m)) out.push_back(std::move(m));
  if (warnings) *warnings = reader.Warnings();
  return out;
}

std::vector<AlignmentVector> ReadIntVectorArchive(std::istream &is,
                                                  std::vector<std::string> *warnings) {
  IntVectorArchiveReader reader(is);
  std::vector<AlignmentVector> out;
  AlignmentVector v;
  while (reader.Next(&v)) out.push_back(std::move(v));
  if (warnings) *warnings = reader.Warnings();
  return out;
}

void WriteMatrixArchive(std::span<const FeatureMatrix> entries, ArchiveMode mode,
                        std::ostream &os) {
  for (const auto &e : entries) {
    CheckKey(e.key);
    if (e.NumRows() < 1 || e.NumCols() < 1)
      throw Error("matrix '" + e.key + "' has empty dimensions");
  }
  MatrixArchiveWriter writer(os, mode);
  for (const auto &e : entries) writer.Write(e);
}

void WriteIntVectorArchive(std::span<const AlignmentVector> entries,
                           ArchiveMode mode, std::ostream &os) {
  for (const auto &e : entries) {
    CheckKey(e.key);
    for (std::int32_t v : e.pdf_ids)
      if (v < 0)
        throw Error("negative element " + std::to_string(v) + " in vector '" +
                    e.key + "'");
  }
  IntVectorArchiveWriter writer(os, mode);
  for (const auto &e : entries) writer.Write(e);
}

std::vector<FeatureMatrix> ReadMatrixArchiveFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return ReadMatrixArchive(is);
}

std::vector<AlignmentVector> ReadIntVectorArchiveFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return ReadIntVectorArchive(is);
}

}  // namespace ramdec
