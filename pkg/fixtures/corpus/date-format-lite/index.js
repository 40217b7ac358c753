function format(date, pattern) {
  const pad = (n) => String(n).padStart(2, '0');
  return pattern
    .replace('YYYY', date.getFullYear())
    .replace('MM', pad(date.getMonth() + 1))
    .replace('DD', pad(date.getDate()));
}

module.exports = format;
