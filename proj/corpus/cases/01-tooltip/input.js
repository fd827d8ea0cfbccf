import React, { useState } from 'react';
import './Tooltip.css';

const Tooltip = ({ text, children }) => {
  const [isVisible, setIsVisible] = useState(false);

  const handleMouseOver = () => {
    setIsVisible(!isVisible);
  };

  return (
    <div className="tooltip-container">
      <div className="tooltip-trigger" onClick={handleMouseOver}>{children}</div>
      <div className={`tooltip-text ${isVisible ? 'visible' : ''}`}>{text}</div>
    </div>
  );
};

export default Tooltip;
