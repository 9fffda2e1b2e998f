/**
 * Minimal binary PPM/PGM encoding. The native CLI accepts these losslessly,
 * which makes them the cheapest wire format for raw sample buffers.
 */

/**
 * Encode a row-major, channel-interleaved 8-bit buffer as P5 (1 channel)
 * or P6 (3 channels).
 */
export function encodePpm(
  buffer: Uint8Array,
  width: number,
  height: number,
  channels: number,
): Uint8Array {
  if (channels !== 1 && channels !== 3) {
    throw new Error(`channels must be 1 or 3, got ${channels}`);
  }
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new Error(`invalid dimensions ${width}x${height}`);
  }
  const expected = width * height * channels;
  if (buffer.length !== expected) {
    throw new Error(
      `buffer holds ${buffer.length} samples but ${width}x${height}x${channels} ` +
        `needs ${expected}; pass a contiguous row-major copy of exactly that size`,
    );
  }
  const header = Buffer.from(`${channels === 1 ? "P5" : "P6"}\n${width} ${height}\n255\n`, "ascii");
  const out = new Uint8Array(header.length + expected);
  out.set(header, 0);
  out.set(buffer, header.length);
  return out;
}
