#include "vidaug/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vidaug {

namespace {

void put_u32le(std::string& out, uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

uint32_t get_u32le(const unsigned char* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failure on '" + path + "'");
  return buf.str();
}

/// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out.good()) throw IoError("write failure on '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename temp file onto '" + path + "'");
  }
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace

VideoClip load_clip(const std::string& path) {
  std::string bytes = read_file(path);
  if (bytes.size() < kClipHeaderSize) {
    throw FormatError("'" + path + "': file shorter than the 24-byte header");
  }
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, kClipMagic, 4) != 0) {
    throw FormatError("'" + path + "': bad magic, not a .vclip file");
  }
  uint32_t version = get_u32le(p + 4);
  if (version != kClipVersion) {
    throw FormatError("'" + path + "': unsupported version " +
                      std::to_string(version));
  }
  VideoClip clip;
  clip.t = get_u32le(p + 8);
  clip.h = get_u32le(p + 12);
  clip.w = get_u32le(p + 16);
  clip.c = get_u32le(p + 20);
  if (clip.t == 0 || clip.h == 0 || clip.w == 0 || clip.c == 0) {
    throw ValidationError("'" + path + "': header declares a zero dimension");
  }
  size_t payload = size_t(clip.t) * clip.h * clip.w * clip.c;
  size_t have = bytes.size() - kClipHeaderSize;
  if (have < payload) {
    std::ostringstream os;
    os << "'" << path << "': payload truncated, expected " << payload
       << " bytes, found " << have;
    throw TruncationError(os.str());
  }
  if (have > payload) {
    throw FormatError("'" + path + "': trailing bytes after payload");
  }
  clip.clip_id = stem_of(path);
  clip.frames.assign(p + kClipHeaderSize, p + kClipHeaderSize + payload);
  clip.validate();
  return clip;
}

void save_clip(const VideoClip& clip, const std::string& path) {
  clip.validate();
  std::string bytes;
  bytes.reserve(kClipHeaderSize + clip.frames.size());
  bytes.append(kClipMagic, 4);
  put_u32le(bytes, kClipVersion);
  put_u32le(bytes, clip.t);
  put_u32le(bytes, clip.h);
  put_u32le(bytes, clip.w);
  put_u32le(bytes, clip.c);
  bytes.append(reinterpret_cast<const char*>(clip.frames.data()),
               clip.frames.size());
  write_file_atomic(path, bytes);
}

std::map<std::string, BoxTrack> load_box_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open box file '" + path + "'");
  std::map<std::string, BoxTrack> tracks;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("'" + path + "' line " + std::to_string(lineno) +
                        ": " + e.what());
    }
    try {
      std::string id = obj.at("clip_id").get<std::string>();
      BoxTrack::Box box;
      box.frame = obj.at("frame").get<uint32_t>();
      box.x0 = obj.at("x0").get<int32_t>();
      box.y0 = obj.at("y0").get<int32_t>();
      box.x1 = obj.at("x1").get<int32_t>();
      box.y1 = obj.at("y1").get<int32_t>();
      box.score = obj.at("score").get<double>();
      BoxTrack& track = tracks[id];
      track.clip_id = id;
      track.boxes.push_back(box);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("'" + path + "' line " + std::to_string(lineno) +
                        ": " + e.what());
    }
  }
  return tracks;
}

void save_box_file(const std::map<std::string, BoxTrack>& tracks,
                   const std::string& path) {
  std::string out;
  for (const auto& [id, track] : tracks) {
    for (const BoxTrack::Box& b : track.boxes) {
      nlohmann::json obj{{"clip_id", id}, {"frame", b.frame}, {"x0", b.x0},
                         {"y0", b.y0},    {"x1", b.x1},       {"y1", b.y1},
                         {"score", b.score}};
      out += obj.dump();
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

std::map<std::string, int> load_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file '" + path + "'");
  std::map<std::string, int> labels;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line == "clip_id,class_index") continue;
    size_t comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw FormatError("'" + path + "' line " + std::to_string(lineno) +
                        ": expected 'clip_id,class_index'");
    }
    std::string id = line.substr(0, comma);
    int cls;
    try {
      cls = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("'" + path + "' line " + std::to_string(lineno) +
                        ": class index is not an integer");
    }
    if (cls < 0) {
      throw ValidationError("'" + path + "' line " + std::to_string(lineno) +
                            ": negative class index");
    }
    labels[id] = cls;
  }
  return labels;
}

void save_label_file(const std::vector<std::pair<std::string, int>>& labels,
                     const std::string& path) {
  std::string out = "clip_id,class_index\n";
  for (const auto& [id, cls] : labels) {
    out += id;
    out += ',';
    out += std::to_string(cls);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_frame_strip(const VideoClip& clip, const std::string& path) {
  clip.validate();
  const uint32_t strip_w = clip.t * clip.w;
  std::string bytes;
  bytes += (clip.c == 1) ? "P5\n" : "P6\n";
  bytes += std::to_string(strip_w) + " " + std::to_string(clip.h) + "\n255\n";
  bytes.reserve(bytes.size() + size_t(strip_w) * clip.h * clip.c);
  for (uint32_t y = 0; y < clip.h; ++y) {
    for (uint32_t f = 0; f < clip.t; ++f) {
      const uint8_t* row = clip.frames.data() + clip.index(f, y, 0, 0);
      bytes.append(reinterpret_cast<const char*>(row), size_t(clip.w) * clip.c);
    }
  }
  write_file_atomic(path, bytes);
}

}  // namespace vidaug
