#include "image_io.hpp"

#include <algorithm>
#include <cstdio>
#include <csetjmp>
#include <memory>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace deckgen {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

RasterImage decode_png(FILE* fp, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(Errc::io, path + ": libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(Errc::io, path + ": libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::io, path + ": PNG decode failed");
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    png_set_expand(png);          // palette/low-bit/tRNS to full depth
    png_set_strip_16(png);        // 16-bit channels down to 8
    png_set_gray_to_rgb(png);     // grayscale to RGB
    png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(png, info);

    RasterImage img;
    img.width = int(png_get_image_width(png, info));
    img.height = int(png_get_image_height(png, info));
    const size_t stride = png_get_rowbytes(png, info);
    if (stride != size_t(img.width) * 4) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::io, path + ": unexpected PNG row layout");
    }
    img.rgba.resize(size_t(img.width) * size_t(img.height) * 4);
    std::vector<png_bytep> rows(size_t(img.height));
    for (int y = 0; y < img.height; ++y) rows[size_t(y)] = &img.rgba[size_t(y) * stride];
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

RasterImage decode_jpeg(FILE* fp, const std::string& path) {
    jpeg_decompress_struct cinfo{};
    JpegErrorMgr err{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw Error(Errc::io, path + ": JPEG decode failed");
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    RasterImage img;
    img.width = int(cinfo.output_width);
    img.height = int(cinfo.output_height);
    img.rgba.resize(size_t(img.width) * size_t(img.height) * 4);
    std::vector<uint8_t> row(size_t(img.width) * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        uint8_t* rowp = row.data();
        const int y = int(cinfo.output_scanline);
        jpeg_read_scanlines(&cinfo, &rowp, 1);
        uint8_t* dst = &img.rgba[size_t(y) * size_t(img.width) * 4];
        for (int x = 0; x < img.width; ++x) {
            dst[x * 4 + 0] = row[size_t(x) * 3 + 0];
            dst[x * 4 + 1] = row[size_t(x) * 3 + 1];
            dst[x * 4 + 2] = row[size_t(x) * 3 + 2];
            dst[x * 4 + 3] = 0xFF; // JPEG carries no alpha
        }
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

} // namespace

bool looks_like_raster(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return false;
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == "png" || ext == "jpg" || ext == "jpeg";
}

RasterImage decode_image_file(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error(Errc::io, path + ": cannot open file");

    unsigned char magic[2] = {0, 0};
    if (std::fread(magic, 1, 2, fp.get()) != 2)
        throw Error(Errc::io, path + ": file too short to identify");
    std::rewind(fp.get());

    if (magic[0] == 0x89 && magic[1] == 'P') return decode_png(fp.get(), path);
    if (magic[0] == 0xFF && magic[1] == 0xD8) return decode_jpeg(fp.get(), path);
    throw Error(Errc::io, path + ": not a PNG or JPEG file");
}

} // namespace deckgen
