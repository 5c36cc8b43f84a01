#include "ctc/utf8.hpp"

namespace ctc {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

bool is_wide(char32_t c) {
    return (c >= 0x1100 && c <= 0x115F) ||    // Hangul Jamo
           (c >= 0x2E80 && c <= 0x303E) ||    // CJK radicals .. CJK symbols
           (c >= 0x3041 && c <= 0x33FF) ||    // Hiragana .. CJK compatibility
           (c >= 0x3400 && c <= 0x4DBF) ||    // CJK ext A
           (c >= 0x4E00 && c <= 0x9FFF) ||    // CJK unified
           (c >= 0xA000 && c <= 0xA4CF) ||    // Yi
           (c >= 0xAC00 && c <= 0xD7A3) ||    // Hangul syllables
           (c >= 0xF900 && c <= 0xFAFF) ||    // CJK compatibility ideographs
           (c >= 0xFE30 && c <= 0xFE4F) ||    // CJK compatibility forms
           (c >= 0xFF00 && c <= 0xFF60) ||    // fullwidth forms
           (c >= 0xFFE0 && c <= 0xFFE6) ||
           (c >= 0x1F300 && c <= 0x1F64F) ||  // emoji
           (c >= 0x1F900 && c <= 0x1F9FF) ||
           (c >= 0x20000 && c <= 0x3FFFD);    // CJK ext B and beyond
}

bool is_combining(char32_t c) {
    return (c >= 0x0300 && c <= 0x036F) || (c >= 0x1AB0 && c <= 0x1AFF) ||
           (c >= 0x1DC0 && c <= 0x1DFF) || (c >= 0x20D0 && c <= 0x20FF) ||
           (c >= 0xFE20 && c <= 0xFE2F) || c == 0x200B || c == 0x200D;
}

}  // namespace

Text decode_utf8(std::string_view bytes) {
    Text out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        const auto lead = static_cast<unsigned char>(bytes[i]);
        char32_t cp = 0;
        std::size_t len = 0;
        char32_t min = 0;
        if (lead < 0x80) {
            out.push_back(lead);
            ++i;
            continue;
        } else if ((lead & 0xE0) == 0xC0) {
            cp = lead & 0x1F;
            len = 2;
            min = 0x80;
        } else if ((lead & 0xF0) == 0xE0) {
            cp = lead & 0x0F;
            len = 3;
            min = 0x800;
        } else if ((lead & 0xF8) == 0xF0) {
            cp = lead & 0x07;
            len = 4;
            min = 0x10000;
        } else {
            throw Utf8Error("invalid UTF-8 lead byte", i);
        }
        if (i + len > bytes.size()) {
            throw Utf8Error("truncated UTF-8 sequence", i);
        }
        for (std::size_t k = 1; k < len; ++k) {
            const auto c = static_cast<unsigned char>(bytes[i + k]);
            if (!is_continuation(c)) {
                throw Utf8Error("invalid UTF-8 continuation byte", i + k);
            }
            cp = (cp << 6) | (c & 0x3F);
        }
        if (cp < min) {
            throw Utf8Error("overlong UTF-8 sequence", i);
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            throw Utf8Error("UTF-8 sequence encodes a non-scalar value", i);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(TextView text) {
    std::string out;
    out.reserve(text.size() * 3);
    for (char32_t c : text) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (c >> 18)));
            out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

bool is_valid_utf8(std::string_view bytes) noexcept {
    try {
        decode_utf8(bytes);
        return true;
    } catch (const Utf8Error&) {
        return false;
    }
}

std::size_t display_width(std::string_view utf8) {
    std::size_t width = 0;
    for (char32_t c : decode_utf8(utf8)) {
        if (is_combining(c)) {
            continue;
        }
        width += is_wide(c) ? 2 : 1;
    }
    return width;
}

}  // namespace ctc
