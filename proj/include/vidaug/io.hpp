#pragma once

#include <map>
#include <string>
#include <vector>

#include "vidaug/clip.hpp"

namespace vidaug {

// .vclip container, little-endian:
//   bytes 0-3   magic "VCLP"
//   u32         version (1)
//   u32 x 4     T, H, W, C
//   T*H*W*C     payload, frame-major, row-major, channel-interleaved
inline constexpr char kClipMagic[4] = {'V', 'C', 'L', 'P'};
inline constexpr uint32_t kClipVersion = 1;
inline constexpr size_t kClipHeaderSize = 24;

/// Reads a .vclip file. clip_id is set to the file name without extension.
VideoClip load_clip(const std::string& path);

/// Writes the container atomically (temp file + rename), so an interrupted
/// run never leaves a partial .vclip behind.
void save_clip(const VideoClip& clip, const std::string& path);

/// Box file: one JSON object per line,
/// {"clip_id": str, "frame": int, "x0": int, "y0": int, "x1": int,
///  "y1": int, "score": float}, grouped by clip_id on load.
std::map<std::string, BoxTrack> load_box_file(const std::string& path);
void save_box_file(const std::map<std::string, BoxTrack>& tracks,
                   const std::string& path);

/// Label file: CSV "clip_id,class_index" with a header row.
std::map<std::string, int> load_label_file(const std::string& path);
void save_label_file(const std::vector<std::pair<std::string, int>>& labels,
                     const std::string& path);

/// Writes frames side by side as one binary PGM (c=1) or PPM (c=3) image
/// of size (t*w) x h.
void write_frame_strip(const VideoClip& clip, const std::string& path);

}  // namespace vidaug
