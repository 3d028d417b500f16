#include "verbatim/unicode.hpp"

#include <array>
#include <unordered_map>

#include "verbatim/errors.hpp"

namespace verbatim::uni {

namespace {

// (base << 32 | combining mark) -> precomposed character.
struct ComposePair {
    char32_t base;
    char32_t mark;
    char32_t composed;
};

// Latin canonical compositions: acute, grave, circumflex, tilde, diaeresis,
// ring, cedilla, caron, macron, breve, dot above, ogonek, double acute.
constexpr ComposePair kCompositions[] = {
    // U+0301 combining acute
    {U'A', 0x0301, 0x00C1}, {U'E', 0x0301, 0x00C9}, {U'I', 0x0301, 0x00CD},
    {U'O', 0x0301, 0x00D3}, {U'U', 0x0301, 0x00DA}, {U'Y', 0x0301, 0x00DD},
    {U'a', 0x0301, 0x00E1}, {U'e', 0x0301, 0x00E9}, {U'i', 0x0301, 0x00ED},
    {U'o', 0x0301, 0x00F3}, {U'u', 0x0301, 0x00FA}, {U'y', 0x0301, 0x00FD},
    {U'C', 0x0301, 0x0106}, {U'c', 0x0301, 0x0107}, {U'L', 0x0301, 0x0139},
    {U'l', 0x0301, 0x013A}, {U'N', 0x0301, 0x0143}, {U'n', 0x0301, 0x0144},
    {U'R', 0x0301, 0x0154}, {U'r', 0x0301, 0x0155}, {U'S', 0x0301, 0x015A},
    {U's', 0x0301, 0x015B}, {U'Z', 0x0301, 0x0179}, {U'z', 0x0301, 0x017A},
    // U+0300 combining grave
    {U'A', 0x0300, 0x00C0}, {U'E', 0x0300, 0x00C8}, {U'I', 0x0300, 0x00CC},
    {U'O', 0x0300, 0x00D2}, {U'U', 0x0300, 0x00D9}, {U'a', 0x0300, 0x00E0},
    {U'e', 0x0300, 0x00E8}, {U'i', 0x0300, 0x00EC}, {U'o', 0x0300, 0x00F2},
    {U'u', 0x0300, 0x00F9},
    // U+0302 combining circumflex
    {U'A', 0x0302, 0x00C2}, {U'E', 0x0302, 0x00CA}, {U'I', 0x0302, 0x00CE},
    {U'O', 0x0302, 0x00D4}, {U'U', 0x0302, 0x00DB}, {U'a', 0x0302, 0x00E2},
    {U'e', 0x0302, 0x00EA}, {U'i', 0x0302, 0x00EE}, {U'o', 0x0302, 0x00F4},
    {U'u', 0x0302, 0x00FB}, {U'W', 0x0302, 0x0174}, {U'w', 0x0302, 0x0175},
    {U'Y', 0x0302, 0x0176}, {U'y', 0x0302, 0x0177},
    // U+0303 combining tilde
    {U'A', 0x0303, 0x00C3}, {U'N', 0x0303, 0x00D1}, {U'O', 0x0303, 0x00D5},
    {U'a', 0x0303, 0x00E3}, {U'n', 0x0303, 0x00F1}, {U'o', 0x0303, 0x00F5},
    // U+0308 combining diaeresis
    {U'A', 0x0308, 0x00C4}, {U'E', 0x0308, 0x00CB}, {U'I', 0x0308, 0x00CF},
    {U'O', 0x0308, 0x00D6}, {U'U', 0x0308, 0x00DC}, {U'a', 0x0308, 0x00E4},
    {U'e', 0x0308, 0x00EB}, {U'i', 0x0308, 0x00EF}, {U'o', 0x0308, 0x00F6},
    {U'u', 0x0308, 0x00FC}, {U'y', 0x0308, 0x00FF}, {U'Y', 0x0308, 0x0178},
    // U+030A combining ring above
    {U'A', 0x030A, 0x00C5}, {U'a', 0x030A, 0x00E5},
    // U+0327 combining cedilla
    {U'C', 0x0327, 0x00C7}, {U'c', 0x0327, 0x00E7}, {U'S', 0x0327, 0x015E},
    {U's', 0x0327, 0x015F},
    // U+030C combining caron
    {U'C', 0x030C, 0x010C}, {U'c', 0x030C, 0x010D}, {U'E', 0x030C, 0x011A},
    {U'e', 0x030C, 0x011B}, {U'R', 0x030C, 0x0158}, {U'r', 0x030C, 0x0159},
    {U'S', 0x030C, 0x0160}, {U's', 0x030C, 0x0161}, {U'Z', 0x030C, 0x017D},
    {U'z', 0x030C, 0x017E},
    // U+0304 combining macron
    {U'A', 0x0304, 0x0100}, {U'a', 0x0304, 0x0101}, {U'E', 0x0304, 0x0112},
    {U'e', 0x0304, 0x0113}, {U'I', 0x0304, 0x012A}, {U'i', 0x0304, 0x012B},
    {U'O', 0x0304, 0x014C}, {U'o', 0x0304, 0x014D}, {U'U', 0x0304, 0x016A},
    {U'u', 0x0304, 0x016B},
    // U+0306 combining breve
    {U'A', 0x0306, 0x0102}, {U'a', 0x0306, 0x0103}, {U'G', 0x0306, 0x011E},
    {U'g', 0x0306, 0x011F},
    // U+0307 combining dot above
    {U'Z', 0x0307, 0x017B}, {U'z', 0x0307, 0x017C},
    // U+0328 combining ogonek
    {U'A', 0x0328, 0x0104}, {U'a', 0x0328, 0x0105}, {U'E', 0x0328, 0x0118},
    {U'e', 0x0328, 0x0119},
    // U+030B combining double acute
    {U'O', 0x030B, 0x0150}, {U'o', 0x030B, 0x0151}, {U'U', 0x030B, 0x0170},
    {U'u', 0x030B, 0x0171},
};

const std::unordered_map<std::uint64_t, char32_t>& compose_map() {
    static const auto* map = [] {
        auto* m = new std::unordered_map<std::uint64_t, char32_t>();
        for (const auto& p : kCompositions) {
            m->emplace((std::uint64_t(p.base) << 32) | p.mark, p.composed);
        }
        return m;
    }();
    return *map;
}

}  // namespace

bool decode_utf8(std::string_view bytes, std::u32string& out) {
    out.clear();
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto n = bytes.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len;
        char32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (int k = 1; k < len; ++k) {
            const auto bk = static_cast<unsigned char>(bytes[i + k]);
            if ((bk & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (bk & 0x3F);
        }
        // overlong / surrogate / out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
            (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        out.push_back(cp);
        i += len;
    }
    return true;
}

std::u32string decode_utf8_or_throw(std::string_view bytes) {
    std::u32string out;
    if (!decode_utf8(bytes, out)) throw Error("invalid UTF-8 input");
    return out;
}

std::string encode_utf8(std::u32string_view chars) {
    std::string out;
    out.reserve(chars.size());
    for (char32_t cp : chars) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::size_t char_count(std::string_view bytes) {
    std::size_t count = 0;
    for (char c : bytes) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
    }
    return count;
}

std::size_t byte_offset_of_char(std::string_view bytes, std::size_t n) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if ((static_cast<unsigned char>(bytes[i]) & 0xC0) != 0x80) {
            if (seen == n) return i;
            ++seen;
        }
    }
    return bytes.size();
}

std::u32string compose_canonical(std::u32string_view in) {
    std::u32string out;
    out.reserve(in.size());
    const auto& map = compose_map();
    for (char32_t c : in) {
        if (!out.empty()) {
            auto it = map.find((std::uint64_t(out.back()) << 32) | c);
            if (it != map.end()) {
                out.back() = it->second;
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::string compose_canonical_utf8(std::string_view in) {
    return encode_utf8(compose_canonical(decode_utf8_or_throw(in)));
}

std::u32string ascii_fold(std::u32string_view in) {
    std::u32string out;
    out.reserve(in.size());
    for (char32_t c : in) {
        switch (c) {
            case 0x2018:  // left single quote
            case 0x2019:  // right single quote
            case 0x201A:
                out.push_back(U'\'');
                break;
            case 0x201C:  // left double quote
            case 0x201D:  // right double quote
            case 0x201E:
            case 0x00AB:
            case 0x00BB:
                out.push_back(U'"');
                break;
            case 0x2013:  // en dash
            case 0x2014:  // em dash
            case 0x2212:  // minus sign
                out.push_back(U'-');
                break;
            case 0x2026:  // ellipsis
                out.append(U"...");
                break;
            case 0x00A0:  // no-break space
                out.push_back(U' ');
                break;
            default:
                out.push_back(c);
        }
    }
    return out;
}

char32_t to_lower(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 0x20;
    // Latin-1 uppercase block, skipping the multiplication sign.
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
    // Latin Extended-A upper/lower pairs.
    if (c >= 0x0100 && c <= 0x0137 && (c % 2) == 0) return c + 1;
    if (c >= 0x0139 && c <= 0x0148 && (c % 2) == 1) return c + 1;
    if (c >= 0x014A && c <= 0x0177 && (c % 2) == 0) return c + 1;
    if (c == 0x0178) return 0x00FF;
    if (c == 0x0179 || c == 0x017B || c == 0x017D) return c + 1;
    return c;
}

bool is_space(char32_t c) {
    switch (c) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\f':
        case U'\v':
        case 0x00A0:
        case 0x2028:
        case 0x2029:
            return true;
        default:
            return false;
    }
}

bool is_edge_punct(char32_t c) {
    if (c < 0x80) {
        return (c >= U'!' && c <= U'/') || (c >= U':' && c <= U'@') ||
               (c >= U'[' && c <= U'`') || (c >= U'{' && c <= U'~');
    }
    switch (c) {
        case 0x2018:
        case 0x2019:
        case 0x201A:
        case 0x201C:
        case 0x201D:
        case 0x201E:
        case 0x2013:
        case 0x2014:
        case 0x2026:
        case 0x00AB:
        case 0x00BB:
        case 0x00BF:  // inverted question mark
        case 0x00A1:  // inverted exclamation mark
            return true;
        default:
            return false;
    }
}

}  // namespace verbatim::uni
