function camel(text) {
  return text.replace(/[-_](\w)/g, (_, c) => c.toUpperCase());
}

module.exports = function camelKeys(obj) {
  const out = {};
  for (const key of Object.keys(obj)) {
    out[camel(key)] = obj[key];
  }
  return out;
};
