function leftPad(text, width, fill) {
  fill = fill || ' ';
  text = String(text);
  while (text.length < width) {
    text = fill + text;
  }
  return text;
}

module.exports = leftPad;
