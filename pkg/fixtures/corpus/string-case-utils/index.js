function toTitle(text) {
  return text.replace(/\b\w/g, (c) => c.toUpperCase());
}

function toSnake(text) {
  return text.replace(/([a-z])([A-Z])/g, '$1_$2').toLowerCase();
}

module.exports = { toTitle, toSnake };
