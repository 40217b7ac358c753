function parseColor(text) {
  const m = text.match(/^#([0-9a-f]{6})$/i);
  if (!m) {
    return null;
  }
  const value = m[1];
  return {
    r: parseInt(value.slice(0, 2), 16),
    g: parseInt(value.slice(2, 4), 16),
    b: parseInt(value.slice(4, 6), 16),
  };
}

module.exports = parseColor;
